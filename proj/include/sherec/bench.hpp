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

#ifndef SHEREC_BENCH_HPP_
#define SHEREC_BENCH_HPP_

// End-to-end scenarios (synthetic data, three parties, plaintext oracle) and
// the timing table built from them.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sherec/dataset.hpp"
#include "sherec/deployment.hpp"

namespace sherec {

struct ScenarioParams {
  std::size_t size = 10;
  std::size_t users = 3;
  std::uint64_t seed = 1;
  std::int64_t radius = kDefaultRadius;
  Exec exec = Exec::kParallel;
  bool tcp = false;
  bool record = false;
  // Replace the query user's ratings, e.g. to force zeros.
  std::optional<PreferenceVector> pv_override;
};

struct ScenarioResult {
  Dataset data;
  std::vector<Recommendation> encrypted;
  std::vector<Recommendation> expected;
  RecommendationOutcome timing;
  double rec_time_s = 0;  // server Y's scoring loop, switches included
  double plain_total_s = 0;
  std::vector<LinkTranscript> transcripts;
  std::vector<SessionReport> reports;  // Y then X
};

// Runs setup, initialize and one recommendation, then the plaintext
// pipeline on the same data. Throws kOracleMismatch with an instance dump
// when the two lists differ.
ScenarioResult run_scenario(const KeyMaterial& keys, const ScenarioParams& params);

enum class OutputFormat { kTable, kCsv };

struct BenchConfig {
  std::vector<std::size_t> sizes{10, 20, 40, 80, 100};
  std::size_t security_bits = 512;
  std::size_t repetitions = 5;
  OutputFormat format = OutputFormat::kTable;
  std::uint64_t seed = 1;
  bool warmup = true;
  bool external_baseline = false;
  Exec exec = Exec::kParallel;
};

struct BenchRow {
  std::size_t size = 0;
  double enc_time_s = 0;
  double rec_time_s = 0;
  double dec_time_s = 0;
  double plain_total_s = 0;
  double enc_total_s = 0;
};

// Throws kDomain for an invalid config and kOracleMismatch as above.
// Progress lines go to `log` when given.
std::vector<BenchRow> bench(const BenchConfig& config, std::ostream* log = nullptr);

// Published per-size totals of the FHE-based comparison system, shown as an
// external column; sizes without a published value print "n/a".
const std::map<std::size_t, double>& external_baseline();

std::string format_table(const std::vector<BenchRow>& rows, bool external = false);
std::string format_csv(const std::vector<BenchRow>& rows, bool external = false);
std::vector<BenchRow> parse_csv(const std::string& text);

}  // namespace sherec

#endif  // SHEREC_BENCH_HPP_
