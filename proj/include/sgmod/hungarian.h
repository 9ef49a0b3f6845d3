/* Copyright 2026 The sgmod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SGMOD_HUNGARIAN_H_
#define SGMOD_HUNGARIAN_H_

#include <cstddef>
#include <utility>
#include <vector>

#include "sgmod/matrix.h"

namespace sgmod {

// Minimum-cost assignment on a rectangular cost matrix (Kuhn-Munkres with
// potentials, O(min(n,m)^2 * max(n,m))). Returns min(rows, cols) (row, col)
// pairs sorted by row. Costs must be finite; encode forbidden pairs with a
// large finite sentinel. Rows are inserted in increasing order and columns
// scanned in increasing order, so ties resolve the same way on every run.
std::vector<std::pair<std::size_t, std::size_t>> HungarianSolve(
    const Matrix& cost);

// Sum of cost(r, c) over the pairs, accumulated in row order.
double AssignmentCost(const Matrix& cost,
                      const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

}  // namespace sgmod

#endif  // SGMOD_HUNGARIAN_H_
