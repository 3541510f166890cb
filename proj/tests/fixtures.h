// Copyright 2026 The exposure_loop Authors.
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

#ifndef EXPOSURE_LOOP_TESTS_FIXTURES_H_
#define EXPOSURE_LOOP_TESTS_FIXTURES_H_

#include "exposure_loop/ingest.h"
#include "exposure_loop/matrix.h"
#include "exposure_loop/synth.h"

namespace exposure_loop::testing {

struct Instance {
  EntityIndices indices;
  SparseInteractionMatrix matrix;
  IndexedCatalog catalog;
};

inline Instance make_instance(const SynthConfig& config) {
  const auto data = generate(config);
  Instance inst;
  inst.indices = index_entities(data.interactions);
  inst.matrix = SparseInteractionMatrix::from_triplets(to_indexed(data.interactions, inst.indices),
                                                       inst.indices.users.size(),
                                                       inst.indices.items.size());
  inst.catalog = join_catalog(data.catalog, inst.indices.items);
  return inst;
}

inline SynthConfig tiny_synth(std::uint64_t seed = 3) {
  SynthConfig c;
  c.n_users = 60;
  c.n_items = 40;
  c.n_artists = 8;
  c.interactions_per_user = 6;
  c.n_tags = 10;
  c.seed = seed;
  return c;
}

}  // namespace exposure_loop::testing

#endif  // EXPOSURE_LOOP_TESTS_FIXTURES_H_
