// Copyright 2026 The dpstream Authors
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

#ifndef DPSTREAM_ADAPTIVE_HPP_
#define DPSTREAM_ADAPTIVE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpstream/block_ledger.hpp"
#include "dpstream/event_log.hpp"
#include "dpstream/pipelines.hpp"
#include "dpstream/validators.hpp"

namespace dpstream {

enum class PipelineStatus { kWaiting, kTraining, kAccepted, kRejected, kTimedOut };

std::string ToString(PipelineStatus s);

// Budget-allocation strategy for block streams. Both split each new block's
// budget evenly across waiting pipelines; they differ in how a pipeline
// spends what it holds.
enum class AllocationPolicy { kEvenSplitConserve, kEvenSplitAggressive };

struct PipelineConfig {
  TrainerKind trainer = TrainerKind::kScalarStat;
  ValidatorConfig validator;          // epsilon is overwritten per attempt
  int64_t min_window_records = 1024;  // first attempt's data requirement
  double eps0 = 0.0125;               // first attempt's budget (conserve)
  double delta0 = 0.0;                // per-attempt delta, held fixed
  int max_attempts = 20;
  int64_t max_wall_steps = 100000;
  double train_fraction = 0.5;  // attempt budget split trainer/validator
  double test_fraction = 0.1;   // window tail held out for loss validation
  bool enable_reject = false;   // run the REJECT test on RETRY (loss metric);
                                // uses the DP model as approximate minimizer
  LinregConfig linreg;
  double value_range = 1.0;     // clip range for scalar/group trainers
  int nkeys = 1;
};

struct AttemptRecord {
  int64_t step = 0;
  double epsilon = 0.0;
  int64_t n_records = 0;
  Verdict verdict = Verdict::kRetry;
  double dp_bound = 0.0;
  bool training_failed = false;
};

struct PipelineState {
  std::string id;
  PipelineConfig config;
  PipelineStatus status = PipelineStatus::kWaiting;
  PrivacyParams allocated;  // reserved and unspent, summed over blocks
  PrivacyParams spent;      // query-level total over granted attempts
  int64_t current_n = 0;
  double current_eps = 0.0;
  int attempts = 0;
  int64_t arrival_time = 0;
  int64_t release_time = -1;
  BlockId anchor_block = -1;  // window extends from here toward newer blocks
  std::vector<AttemptRecord> history;

  bool terminal() const {
    return status == PipelineStatus::kAccepted ||
           status == PipelineStatus::kRejected ||
           status == PipelineStatus::kTimedOut;
  }
};

struct SchedulerConfig {
  LedgerConfig ledger;
  AllocationPolicy policy = AllocationPolicy::kEvenSplitConserve;
  int64_t records_per_step = 16000;  // one block of data per time step
  SyntheticSource source;
  uint64_t seed = 0;
  bool noise_off = false;  // test-only; never consulted by the ledger
};

struct PipelineReport {
  std::string id;
  PipelineStatus status = PipelineStatus::kWaiting;
  int64_t arrival_time = 0;
  int64_t release_time = -1;  // -1 when censored
  int attempts = 0;
  PrivacyParams total_spend;
};

struct RunReport {
  std::vector<PipelineReport> pipelines;
  int64_t steps_run = 0;

  void WriteTo(std::ostream& os) const;
};

// Privacy-adaptive training orchestrator: ingests the stream into blocks,
// splits each new block's budget across waiting pipelines, and drives every
// pipeline's train -> validate -> retry loop with resource doubling.
class Scheduler {
 public:
  explicit Scheduler(SchedulerConfig config);

  // Registers a pipeline arriving at `step` (must be >= the current step).
  void AddArrival(int64_t step, PipelineConfig config, std::string id = "");

  // Runs `steps` further time steps.
  void RunSteps(int64_t steps);
  RunReport Report() const;

  // New data arrived as a block: split its budget evenly among waiting
  // pipelines; with none waiting the budget stays unallocated headroom.
  void OnNewBlock(BlockId id);

  // One training/validation attempt (or wait) for a non-terminal pipeline.
  void StepPipeline(PipelineState& p);

  const BlockLedger& ledger() const { return ledger_; }
  const std::vector<PipelineState>& pipelines() const { return pipelines_; }
  const EventLog& log() const { return log_; }
  int64_t now() const { return now_; }

  double UnallocatedEps(BlockId id) const;
  double AllocatedEps(BlockId id, const std::string& pipeline_id) const;

  // Largest absolute per-block error of
  //   unallocated + sum of allocations + linear spend == eps_g.
  double ConservationError() const;

 private:
  struct BlockMeta {
    BlockId id;
    int64_t rec_begin;
    int64_t rec_end;
    bool retired;
  };
  struct Window {
    bool ready = false;
    BlockId begin = -1;
    BlockId end = -1;
    int64_t rec_begin = 0;
    int64_t rec_end = 0;
  };

  void IngestStep();
  Window ComputeWindow(PipelineState& p);
  double AvailableEps(BlockId b, int pipeline_index) const;
  void Claim(BlockId b, int pipeline_index, const PrivacyParams& amount);
  void ReleaseAllocations(PipelineState& p);
  bool RunAttempt(PipelineState& p, const Window& w);
  int PipelineIndex(const PipelineState& p) const;
  std::vector<int> NonTerminalIndices() const;

  SchedulerConfig config_;
  EventLog log_;
  BlockLedger ledger_;
  std::vector<BlockMeta> blocks_;
  // Per block: reserved budget by pipeline index, plus the unallocated pool.
  std::vector<std::map<int, PrivacyParams>> alloc_;
  std::vector<PrivacyParams> unallocated_;
  std::vector<PipelineState> pipelines_;
  std::multimap<int64_t, int> arrivals_;  // step -> pipeline index
  int64_t now_ = 0;
};

}  // namespace dpstream

#endif  // DPSTREAM_ADAPTIVE_HPP_
