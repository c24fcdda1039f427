// Copyright 2026 The qsl Authors
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

#pragma once

namespace qsl {

// Every numerical threshold used by the library, in one place.
// All values are absolute and assume unit-trace states.
struct ToleranceSet {
  double hermiticity = 1e-12;   // max |A - A^dagger| elementwise
  double trace = 1e-10;         // |Tr rho - 1|
  double psd = 1e-10;           // most negative eigenvalue tolerated in a state
  double rank = 1e-10;          // p_j below this is an unsupported level
  double gap = 1e-8;            // smallest |p_j - p_k| for which H_t is identifiable
  double degeneracy = 1e-10;    // eigenvalues closer than this share a block
  double continuity = 0.5;      // minimum overlap for a frame match
  double divergence = 1e-6;     // negativity that aborts integration
  double drive = 1e-9;          // matrix elements below this count as zero drive
  double povm = 1e-9;           // |sum Pi - I|
  double zero_rate = 1e-14;     // rates below this give infinite timescales
};

}  // namespace qsl
