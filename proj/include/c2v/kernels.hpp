// Copyright 2026 The c2v Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense vector kernels shared by every module. Storage may be float or
// double; accumulation is always double.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "c2v/error.hpp"

namespace c2v {

using Vector = std::vector<double>;

template <class A, class B>
double dot(std::span<const A> a, std::span<const B> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

template <class A>
double norm(std::span<const A> a) {
  return std::sqrt(dot(a, a));
}

template <class A, class B>
double squared_distance(std::span<const A> a, std::span<const B> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

/// Cosine of the angle between two vectors. Throws kDomain on a zero norm,
/// which means an empty embedding leaked into similarity math.
template <class A, class B>
double cosine_similarity(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInput, "cosine_similarity: length mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kDomain, "cosine_similarity: zero-norm vector");
  return dot(a, b) / (na * nb);
}

inline double cosine_similarity(const Vector& a, const Vector& b) {
  return cosine_similarity(std::span<const double>(a), std::span<const double>(b));
}

}  // namespace c2v
