// include/xdasr/archive.h
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

#ifndef XDASR_ARCHIVE_H_
#define XDASR_ARCHIVE_H_

#include <string>
#include <vector>

#include "xdasr/dsp.h"

namespace xdasr {

/// One named matrix inside a feature archive.
struct ArchiveRecord {
  std::string id;
  SeqMatrixf data;
};

// Binary layout, all integers little-endian u32:
//   "XDAF" version
//   { id_len, id bytes (UTF-8), rows, cols, rows*cols f32 row-major }*
inline constexpr char kArchiveMagic[4] = {'X', 'D', 'A', 'F'};
inline constexpr std::uint32_t kArchiveVersion = 1;

std::string SerializeArchive(const std::vector<ArchiveRecord>& records);
std::vector<ArchiveRecord> ParseArchive(const std::string& bytes);

void WriteArchive(const std::string& path, const std::vector<FeatureMatrix>& features);
/// Reads records back as FeatureMatrix with only meta.utterance filled in.
std::vector<FeatureMatrix> ReadArchive(const std::string& path);

}  // namespace xdasr

#endif  // XDASR_ARCHIVE_H_
