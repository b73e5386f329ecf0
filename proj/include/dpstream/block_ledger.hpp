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

#ifndef DPSTREAM_BLOCK_LEDGER_HPP_
#define DPSTREAM_BLOCK_LEDGER_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpstream/event_log.hpp"
#include "dpstream/privacy.hpp"

namespace dpstream {

using BlockId = int64_t;

// One stream partition. Record ranges of consecutive blocks are disjoint and
// contiguous; the spend list is append-only; a retired block never accepts
// another spend.
struct Block {
  BlockId id = 0;
  int64_t created_at = 0;
  int64_t record_begin = 0;
  int64_t record_end = 0;  // half-open
  std::vector<PrivacyParams> spends;
  bool retired = false;

  int64_t num_records() const { return record_end - record_begin; }
};

struct LedgerConfig {
  PrivacyParams global;  // (eps_g, delta_g) ceiling per block
  AccountantKind accountant = AccountantKind::kBasic;
  // Strong modes reserve delta_tilde out of delta_g up front; must lie in
  // (0, min(1, delta_g + ...)]. Ignored by the basic accountant.
  double delta_tilde = 0.0;
  // A block retires once its epsilon headroom falls to this floor.
  double retire_epsilon_floor = 0.0;

  void Validate() const;
};

struct AccessRequest {
  std::vector<BlockId> block_ids;  // nonempty; duplicates collapse
  PrivacyParams params;            // epsilon > 0
  std::string requester = "-";
  int64_t time = -1;  // logical time for the log; -1 takes the ledger clock
};

struct AccessDecision {
  bool granted = false;
  // On denial: "retired" or "budget", plus the blocks that limited the grant.
  std::string reason;
  std::vector<BlockId> limiting_blocks;
};

// Raised when the ledger observes a state its own checks should have made
// unreachable.
struct IntegrityError : std::logic_error {
  using std::logic_error::logic_error;
};

struct AuditReport {
  // Componentwise maximum of composed per-block spend; the stream-level
  // guarantee is this pair.
  PrivacyParams max_composed;
  BlockId max_epsilon_block = -1;
  size_t num_blocks = 0;
  size_t num_retired = 0;
};

// The global access controller. All mutations are serialized behind one
// lock; a grant appends the request's params to every requested block or, on
// denial, leaves all of them untouched.
class BlockLedger {
 public:
  explicit BlockLedger(LedgerConfig config, int64_t root_time = 0);

  // Appends a fresh block covering the next n_records stream records.
  BlockId AppendBlock(int64_t n_records, int64_t now);

  // Grants iff, for every requested block, the accountant applied to that
  // block's spends extended by req.params stays within (eps_g, delta_g).
  AccessDecision RequestAccess(const AccessRequest& req);

  // Largest single spend the block could still accept. Under the basic
  // accountant this is (eps_g - sum eps, delta_g - sum delta); under strong
  // accountants the epsilon is found by bisection and the delta is the
  // remaining slack above delta_tilde. Retired blocks report (0, 0).
  PrivacyParams BlockHeadroom(BlockId id) const;

  // Marks exhausted blocks retired; returns the ids retired by this call.
  // A block is exhausted when its epsilon headroom is at or below the
  // configured floor, or when a positive delta slack has been fully spent.
  std::vector<BlockId> RetireExhausted();

  // Stream-level guarantee: max over blocks of composed spend. Throws
  // IntegrityError if any block exceeds (eps_g, delta_g); reaching that
  // throw would mean the grant path is broken.
  AuditReport AuditStreamGuarantee() const;

  const LedgerConfig& config() const { return config_; }
  size_t num_blocks() const;
  Block GetBlock(BlockId id) const;
  std::vector<Block> Blocks() const;
  PrivacyParams ComposedSpend(BlockId id) const;
  // Plain componentwise sum of the block's spends, independent of the
  // accountant; the linear currency used by allocation bookkeeping.
  PrivacyParams LinearSpend(BlockId id) const;
  int64_t total_records() const;

  // Mirrors every ledger event into an external log (shared run logs);
  // the sink must outlive the ledger.
  void SetSink(EventLog* sink) { sink_ = sink; }

  // Replayable line-delimited log of every append/grant/deny/retire event.
  void ExportLog(std::ostream& os) const;
  const EventLog& log() const { return log_; }

  // Rebuilds a ledger by replaying an exported log. Grants are re-checked
  // through the normal access path; a grant that no longer passes raises
  // IntegrityError.
  static BlockLedger Replay(const LedgerConfig& config, std::istream& is);

 private:
  const Block& BlockRef(BlockId id) const;
  PrivacyParams Compose(const std::vector<PrivacyParams>& spends) const;
  PrivacyParams HeadroomLocked(const Block& b) const;
  double DeltaSlackAtCreation() const;
  void Log(Event e);

  LedgerConfig config_;
  std::vector<Block> blocks_;
  int64_t next_record_ = 0;
  int64_t clock_ = 0;
  EventLog log_;
  EventLog* sink_ = nullptr;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
};

}  // namespace dpstream

#endif  // DPSTREAM_BLOCK_LEDGER_HPP_
