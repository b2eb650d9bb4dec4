// Copyright 2026 The sherec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP kernel for the encrypted recommendation loop,
// both roles in-process. Small keys keep a run short; the relative cost is
// what matters here.

#include <benchmark/benchmark.h>

#include "sherec/dataset.hpp"
#include "sherec/recommender.hpp"

namespace {

using namespace sherec;

struct Fixture {
  KeyMaterial keys;
  EncryptedCoMatrix cm;
  std::vector<PairEncodedValue> pv;
};

Fixture make_fixture(std::size_t size) {
  Rng rng = Rng::from_seed(7);
  Fixture f{keygen(128, rng), {}, {}};
  Dataset d = gen_data(GenDataParams{size, 4, 7});
  CoMatrix cm = build_cm(d.lists, size);
  f.cm.size = size;
  for (auto v : cm.entries()) f.cm.entries.push_back(pair_encode(f.keys.mul.pk, from_u64(v), rng));
  for (auto r : d.pvs.at(d.query_user)) f.pv.push_back(pair_encode(f.keys.mul.pk, from_u64(r), rng));
  return f;
}

void run(benchmark::State& state, bool parallel) {
  Fixture f = make_fixture(static_cast<std::size_t>(state.range(0)));
  Rng rng = Rng::from_seed(11);
  for (auto _ : state) {
    LocalSwitch sw(f.keys.add.pk, f.keys.mul.pk, f.keys.shares.proxy.mul, f.keys.shares.server.mul,
                   rng.fork(1), parallel ? Exec::kParallel : Exec::kSerial);
    auto out = parallel ? recommend_encrypted(f.keys.add.pk, f.keys.mul.pk, f.cm, f.pv, sw, rng)
                        : recommend_encrypted_serial(f.keys.add.pk, f.keys.mul.pk, f.cm, f.pv, sw, rng);
    benchmark::DoNotOptimize(out);
  }
  state.SetComplexityN(state.range(0));
}

void BM_RecommendSerial(benchmark::State& state) { run(state, false); }
void BM_RecommendParallel(benchmark::State& state) { run(state, true); }

BENCHMARK(BM_RecommendSerial)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_RecommendParallel)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond)->Complexity();

}  // namespace

BENCHMARK_MAIN();
