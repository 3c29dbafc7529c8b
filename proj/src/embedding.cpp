// Copyright 2026 The lgbg Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lgbg/embedding.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lgbg/error.hpp"

namespace lgbg {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<double> fallback_embedding(std::string_view concept_name, std::size_t dim,
                                       std::uint64_t seed) {
  std::uint64_t state = fnv1a(concept_name) ^ (seed * 0x9E3779B97F4A7C15ULL);
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (auto& x : v) {
      const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
      x = 2.0 * u - 1.0;
      norm += x * x;
    }
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

EmbeddingTable EmbeddingTable::fallback(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed) {
  EmbeddingTable t;
  t.rows_ = Tensor({vocab.total_size(), dim});
  std::size_t g = 0;
  for (StreamType s : kAllStreams)
    for (const auto& name : vocab.concepts(s)) {
      const auto v = fallback_embedding(name, dim, seed);
      std::copy(v.begin(), v.end(), t.rows_.row(g).begin());
      t.sources_.push_back(EmbeddingSource::kFallback);
      ++g;
    }
  return t;
}

EmbeddingTable EmbeddingTable::from_file(const std::filesystem::path& path, const Vocabulary& vocab,
                                         std::size_t dim, bool allow_fallback, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open embedding file " + path.string());
  std::map<std::string, std::vector<double>, std::less<>> file_rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof())
      fail(ErrorKind::kParse, path.string() + ": line " + std::to_string(line_no) + ": bad number");
    if (v.size() != dim)
      fail(ErrorKind::kEmbedding, path.string() + ": line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(dim) + " values, got " + std::to_string(v.size()));
    file_rows[name] = std::move(v);
  }
  EmbeddingTable t;
  t.rows_ = Tensor({vocab.total_size(), dim});
  std::size_t g = 0;
  for (StreamType s : kAllStreams)
    for (const auto& name : vocab.concepts(s)) {
      auto it = file_rows.find(name);
      std::vector<double> v;
      EmbeddingSource src = EmbeddingSource::kMissing;
      if (it != file_rows.end()) {
        v = it->second;
        src = EmbeddingSource::kFile;
      } else if (allow_fallback) {
        v = fallback_embedding(name, dim, seed);
        src = EmbeddingSource::kFallback;
      }
      if (!v.empty()) std::copy(v.begin(), v.end(), t.rows_.row(g).begin());
      t.sources_.push_back(src);
      ++g;
    }
  t.rows_.require_finite("embedding file");
  return t;
}

EmbeddingTable EmbeddingTable::from_rows(Tensor rows, std::vector<EmbeddingSource> sources) {
  if (rows.rank() != 2 || rows.rows() != sources.size())
    fail(ErrorKind::kDimension, "embedding rows do not match source tags");
  EmbeddingTable t;
  t.rows_ = std::move(rows);
  t.sources_ = std::move(sources);
  return t;
}

std::span<const double> EmbeddingTable::row(std::size_t global_index) const {
  if (!contains(global_index))
    fail(ErrorKind::kEmbedding, "no embedding for concept index " + std::to_string(global_index));
  return rows_.row(global_index);
}

}  // namespace lgbg
