// include/xdasr/manifest.h
//
// Copyright 2026  The xdasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XDASR_MANIFEST_H_
#define XDASR_MANIFEST_H_

#include <optional>
#include <string>
#include <vector>

namespace xdasr {

// One tab-separated line:
//   utt_id  speaker_id  domain  audio_path  "ph1 ph2 ..."  [rir_label  snr_db]
// The two trailing fields appear only in augmented manifests ("-" marks an
// original utterance).
struct ManifestEntry {
  std::string utterance;
  std::string speaker;
  std::string domain;
  std::string audio_path;
  std::vector<std::string> labels;
  std::optional<std::string> rir_label;
  std::optional<std::string> snr_db;
};

using Manifest = std::vector<ManifestEntry>;

std::string FormatManifest(const Manifest& manifest);
/// Throws with the 1-based line number on a malformed line.
Manifest ParseManifest(const std::string& text);

Manifest ReadManifest(const std::string& path);
void WriteManifest(const std::string& path, const Manifest& manifest);

}  // namespace xdasr

#endif  // XDASR_MANIFEST_H_
