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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lgbg/concept_stream.hpp"
#include "lgbg/tensor.hpp"

namespace lgbg {

enum class EmbeddingSource : std::uint8_t { kMissing, kFile, kFallback };

// Initial concept vectors, one row per vocabulary concept (global index).
class EmbeddingTable {
 public:
  // Every concept gets a deterministic unit vector derived from (name, seed).
  static EmbeddingTable fallback(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed);

  // Reads "<name> v1 ... vd" lines. Concepts absent from the file get the
  // fallback vector when `allow_fallback`, otherwise they stay missing and
  // fail when a graph tries to use them.
  static EmbeddingTable from_file(const std::filesystem::path& path, const Vocabulary& vocab,
                                  std::size_t dim, bool allow_fallback, std::uint64_t seed);

  static EmbeddingTable from_rows(Tensor rows, std::vector<EmbeddingSource> sources);

  std::size_t dim() const noexcept { return rows_.cols(); }
  std::size_t size() const noexcept { return sources_.size(); }
  bool contains(std::size_t global_index) const {
    return global_index < sources_.size() && sources_[global_index] != EmbeddingSource::kMissing;
  }
  EmbeddingSource source(std::size_t global_index) const { return sources_.at(global_index); }
  std::span<const double> row(std::size_t global_index) const;
  const Tensor& rows() const noexcept { return rows_; }
  const std::vector<EmbeddingSource>& sources() const noexcept { return sources_; }

 private:
  Tensor rows_;
  std::vector<EmbeddingSource> sources_;
};

std::vector<double> fallback_embedding(std::string_view concept_name, std::size_t dim,
                                       std::uint64_t seed);

}  // namespace lgbg
