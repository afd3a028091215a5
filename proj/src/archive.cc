// src/archive.cc
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

#include "xdasr/archive.h"

#include <bit>
#include <cstring>

namespace xdasr {

static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

namespace {

void PutU32(std::string& out, std::uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  bool AtEnd() const { return pos_ == bytes_.size(); }
  void Take(void* dst, std::size_t n) {
    if (bytes_.size() - pos_ < n) throw Error("archive: truncated record");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t U32() {
    std::uint32_t v;
    Take(&v, 4);
    return v;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeArchive(const std::vector<ArchiveRecord>& records) {
  std::string out(kArchiveMagic, 4);
  PutU32(out, kArchiveVersion);
  for (const auto& r : records) {
    PutU32(out, static_cast<std::uint32_t>(r.id.size()));
    out += r.id;
    PutU32(out, static_cast<std::uint32_t>(r.data.rows()));
    PutU32(out, static_cast<std::uint32_t>(r.data.cols()));
    out.append(reinterpret_cast<const char*>(r.data.data()),
               sizeof(float) * static_cast<std::size_t>(r.data.size()));
  }
  return out;
}

std::vector<ArchiveRecord> ParseArchive(const std::string& bytes) {
  Reader in(bytes);
  char magic[4];
  in.Take(magic, 4);
  if (std::memcmp(magic, kArchiveMagic, 4) != 0) throw Error("archive: bad magic");
  if (in.U32() != kArchiveVersion) throw Error("archive: unsupported version");
  std::vector<ArchiveRecord> records;
  while (!in.AtEnd()) {
    ArchiveRecord r;
    r.id.resize(in.U32());
    in.Take(r.id.data(), r.id.size());
    const std::uint32_t rows = in.U32();
    const std::uint32_t cols = in.U32();
    r.data.resize(rows, cols);
    in.Take(r.data.data(), sizeof(float) * static_cast<std::size_t>(rows) * cols);
    records.push_back(std::move(r));
  }
  return records;
}

void WriteArchive(const std::string& path, const std::vector<FeatureMatrix>& features) {
  std::vector<ArchiveRecord> records;
  records.reserve(features.size());
  for (const auto& f : features)
    records.push_back({f.meta.utterance, f.data.cast<float>()});
  WriteFileBytes(path, SerializeArchive(records));
}

std::vector<FeatureMatrix> ReadArchive(const std::string& path) {
  std::vector<FeatureMatrix> out;
  for (auto& r : ParseArchive(ReadFileBytes(path))) {
    FeatureMatrix f;
    f.meta.utterance = r.id;
    f.data = r.data.cast<double>();
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace xdasr
