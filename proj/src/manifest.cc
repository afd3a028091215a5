// src/manifest.cc
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

#include "xdasr/manifest.h"

#include <sstream>

#include "xdasr/common.h"

namespace xdasr {

namespace {

std::vector<std::string> Split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string FormatManifest(const Manifest& manifest) {
  std::string out;
  for (const auto& e : manifest) {
    out += e.utterance + '\t' + e.speaker + '\t' + e.domain + '\t' + e.audio_path + '\t';
    for (std::size_t i = 0; i < e.labels.size(); ++i) {
      if (i) out += ' ';
      out += e.labels[i];
    }
    if (e.rir_label || e.snr_db)
      out += '\t' + e.rir_label.value_or("-") + '\t' + e.snr_db.value_or("-");
    out += '\n';
  }
  return out;
}

Manifest ParseManifest(const std::string& text) {
  Manifest manifest;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = Split(line, '\t');
    if (fields.size() != 5 && fields.size() != 7)
      throw Error("manifest line " + std::to_string(lineno) + ": expected 5 or 7 fields, got " +
                  std::to_string(fields.size()));
    ManifestEntry e;
    e.utterance = fields[0];
    e.speaker = fields[1];
    e.domain = fields[2];
    e.audio_path = fields[3];
    if (e.utterance.empty())
      throw Error("manifest line " + std::to_string(lineno) + ": empty utterance id");
    std::istringstream labels(fields[4]);
    for (std::string tok; labels >> tok;) e.labels.push_back(tok);
    if (fields.size() == 7) {
      e.rir_label = fields[5];
      e.snr_db = fields[6];
    }
    manifest.push_back(std::move(e));
  }
  return manifest;
}

Manifest ReadManifest(const std::string& path) { return ParseManifest(ReadFileBytes(path)); }

void WriteManifest(const std::string& path, const Manifest& manifest) {
  WriteFileBytes(path, FormatManifest(manifest));
}

}  // namespace xdasr
