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

#include "dpstream/block_ledger.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace dpstream {

namespace {

// Budget comparisons tolerate accumulated floating-point error so that a
// sequence of spends summing analytically to eps_g is granted in full.
double EpsTol(double cap) { return 1e-9 * std::max(1.0, cap); }
double DeltaTol(double cap) { return 1e-9 * cap; }

bool FitsWithinTol(const PrivacyParams& p, const PrivacyParams& cap) {
  return p.epsilon <= cap.epsilon + EpsTol(cap.epsilon) &&
         p.delta <= cap.delta + DeltaTol(cap.delta);
}

}  // namespace

void LedgerConfig::Validate() const {
  global.Validate();
  if (!(global.epsilon > 0.0)) {
    throw std::invalid_argument("eps_g must be positive");
  }
  if (accountant != AccountantKind::kBasic) {
    if (!(delta_tilde > 0.0 && delta_tilde < 1.0)) {
      throw std::invalid_argument("strong accountants need delta_tilde in (0, 1)");
    }
    if (delta_tilde > global.delta) {
      throw std::invalid_argument(
          "delta_tilde exceeds delta_g; no request could ever be granted");
    }
  }
  if (retire_epsilon_floor < 0.0) {
    throw std::invalid_argument("retire floor must be >= 0");
  }
}

BlockLedger::BlockLedger(LedgerConfig config, int64_t root_time)
    : config_(std::move(config)), clock_(root_time) {
  config_.Validate();
}

PrivacyParams BlockLedger::Compose(
    const std::vector<PrivacyParams>& spends) const {
  return ComposeWith(config_.accountant, spends, config_.global.epsilon,
                     config_.delta_tilde);
}

double BlockLedger::DeltaSlackAtCreation() const {
  if (config_.accountant == AccountantKind::kBasic) return config_.global.delta;
  return config_.global.delta - config_.delta_tilde;
}

BlockId BlockLedger::AppendBlock(int64_t n_records, int64_t now) {
  if (n_records <= 0) {
    throw std::invalid_argument("a block must cover at least one record");
  }
  std::lock_guard<std::mutex> lock(*mu_);
  Block b;
  b.id = static_cast<BlockId>(blocks_.size());
  b.created_at = now;
  b.record_begin = next_record_;
  b.record_end = next_record_ + n_records;
  next_record_ = b.record_end;
  clock_ = std::max(clock_, now);
  blocks_.push_back(std::move(b));
  Log({
      .kind = "append",
      .time = now,
      .actor = "-",
      .epsilon = 0.0,
      .delta = 0.0,
      .blocks = {blocks_.back().id},
      .extra = "n=" + std::to_string(n_records),
  });
  return blocks_.back().id;
}

void BlockLedger::Log(Event e) {
  if (sink_ != nullptr) sink_->Append(e);
  log_.Append(std::move(e));
}

const Block& BlockLedger::BlockRef(BlockId id) const {
  if (id < 0 || static_cast<size_t>(id) >= blocks_.size()) {
    throw std::invalid_argument("unknown block id " + std::to_string(id));
  }
  return blocks_[static_cast<size_t>(id)];
}

AccessDecision BlockLedger::RequestAccess(const AccessRequest& req) {
  req.params.Validate();
  if (!(req.params.epsilon > 0.0)) {
    throw std::invalid_argument("access request needs epsilon > 0");
  }
  if (req.block_ids.empty()) {
    throw std::invalid_argument("access request needs at least one block");
  }
  std::lock_guard<std::mutex> lock(*mu_);
  std::set<BlockId> ids(req.block_ids.begin(), req.block_ids.end());
  for (BlockId id : ids) BlockRef(id);  // unknown id throws before any change

  const int64_t when = req.time >= 0 ? req.time : clock_;
  AccessDecision decision;
  for (BlockId id : ids) {
    if (BlockRef(id).retired) decision.limiting_blocks.push_back(id);
  }
  if (!decision.limiting_blocks.empty()) {
    decision.reason = "retired";
  } else {
    for (BlockId id : ids) {
      auto candidate = BlockRef(id).spends;
      candidate.push_back(req.params);
      if (!FitsWithinTol(Compose(candidate), config_.global)) {
        decision.limiting_blocks.push_back(id);
      }
    }
    if (!decision.limiting_blocks.empty()) decision.reason = "budget";
  }

  if (decision.limiting_blocks.empty()) {
    // All checks passed: commit to every requested block.
    for (BlockId id : ids) {
      blocks_[static_cast<size_t>(id)].spends.push_back(req.params);
    }
    decision.granted = true;
  }
  Log({
      .kind = decision.granted ? "grant" : "deny",
      .time = when,
      .actor = req.requester,
      .epsilon = req.params.epsilon,
      .delta = req.params.delta,
      .blocks = std::vector<BlockId>(ids.begin(), ids.end()),
      .extra = decision.granted ? "-" : "reason=" + decision.reason,
  });
  return decision;
}

PrivacyParams BlockLedger::HeadroomLocked(const Block& b) const {
  if (b.retired) return {0.0, 0.0};
  if (config_.accountant == AccountantKind::kBasic) {
    const PrivacyParams used = BasicCompose(b.spends);
    return {std::max(0.0, config_.global.epsilon - used.epsilon),
            std::max(0.0, config_.global.delta - used.delta)};
  }
  double delta_spent = 0.0;
  for (const auto& s : b.spends) delta_spent += s.delta;
  const double delta_slack =
      std::max(0.0, config_.global.delta - config_.delta_tilde - delta_spent);
  // The composed bound is monotone in an appended epsilon, so bisection
  // pins the largest grantable spend.
  auto fits = [&](double eps) {
    auto candidate = b.spends;
    candidate.push_back({eps, delta_slack});
    return FitsWithinTol(Compose(candidate), config_.global);
  };
  double lo = 0.0, hi = config_.global.epsilon;
  if (fits(hi)) return {hi, delta_slack};
  if (!fits(0.0)) return {0.0, delta_slack};
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return {lo, delta_slack};
}

PrivacyParams BlockLedger::BlockHeadroom(BlockId id) const {
  std::lock_guard<std::mutex> lock(*mu_);
  return HeadroomLocked(BlockRef(id));
}

std::vector<BlockId> BlockLedger::RetireExhausted() {
  std::lock_guard<std::mutex> lock(*mu_);
  std::vector<BlockId> retired;
  const double creation_delta_slack = DeltaSlackAtCreation();
  for (auto& b : blocks_) {
    if (b.retired) continue;
    const PrivacyParams headroom = HeadroomLocked(b);
    const bool eps_exhausted =
        headroom.epsilon <= config_.retire_epsilon_floor + 1e-15;
    const bool delta_exhausted =
        creation_delta_slack > 0.0 && headroom.delta <= 0.0;
    if (eps_exhausted || delta_exhausted) {
      b.retired = true;
      retired.push_back(b.id);
    }
  }
  if (!retired.empty()) {
    Log({
        .kind = "retire",
        .time = clock_,
        .actor = "-",
        .epsilon = 0.0,
        .delta = 0.0,
        .blocks = retired,
        .extra = "-",
    });
  }
  return retired;
}

AuditReport BlockLedger::AuditStreamGuarantee() const {
  std::lock_guard<std::mutex> lock(*mu_);
  AuditReport report;
  report.num_blocks = blocks_.size();
  for (const auto& b : blocks_) {
    if (b.retired) ++report.num_retired;
    const PrivacyParams composed = Compose(b.spends);
    if (!FitsWithinTol(composed, config_.global)) {
      throw IntegrityError("block " + std::to_string(b.id) +
                           " exceeds the global guarantee: eps=" +
                           FormatDouble(composed.epsilon) +
                           " delta=" + FormatDouble(composed.delta));
    }
    if (composed.epsilon > report.max_composed.epsilon) {
      report.max_composed.epsilon = composed.epsilon;
      report.max_epsilon_block = b.id;
    }
    report.max_composed.delta = std::max(report.max_composed.delta, composed.delta);
  }
  return report;
}

size_t BlockLedger::num_blocks() const {
  std::lock_guard<std::mutex> lock(*mu_);
  return blocks_.size();
}

Block BlockLedger::GetBlock(BlockId id) const {
  std::lock_guard<std::mutex> lock(*mu_);
  return BlockRef(id);
}

std::vector<Block> BlockLedger::Blocks() const {
  std::lock_guard<std::mutex> lock(*mu_);
  return blocks_;
}

PrivacyParams BlockLedger::ComposedSpend(BlockId id) const {
  std::lock_guard<std::mutex> lock(*mu_);
  return Compose(BlockRef(id).spends);
}

PrivacyParams BlockLedger::LinearSpend(BlockId id) const {
  std::lock_guard<std::mutex> lock(*mu_);
  return BasicCompose(BlockRef(id).spends);
}

int64_t BlockLedger::total_records() const {
  std::lock_guard<std::mutex> lock(*mu_);
  return next_record_;
}

void BlockLedger::ExportLog(std::ostream& os) const {
  std::lock_guard<std::mutex> lock(*mu_);
  log_.WriteTo(os);
}

BlockLedger BlockLedger::Replay(const LedgerConfig& config, std::istream& is) {
  BlockLedger ledger(config);
  const EventLog log = EventLog::ReadFrom(is);
  for (const Event& e : log.events()) {
    if (e.kind == "append") {
      if (e.blocks.size() != 1 || e.extra.rfind("n=", 0) != 0) {
        throw std::invalid_argument("malformed append event");
      }
      const int64_t n = std::stoll(e.extra.substr(2));
      Block b;
      b.id = static_cast<BlockId>(ledger.blocks_.size());
      if (b.id != e.blocks[0]) {
        throw IntegrityError("replayed block id diverged from the log");
      }
      b.created_at = e.time;
      b.record_begin = ledger.next_record_;
      b.record_end = ledger.next_record_ + n;
      ledger.next_record_ = b.record_end;
      ledger.clock_ = std::max(ledger.clock_, e.time);
      ledger.blocks_.push_back(std::move(b));
    } else if (e.kind == "grant") {
      const PrivacyParams params{e.epsilon, e.delta};
      for (BlockId id : e.blocks) {
        const Block& b = ledger.BlockRef(id);
        if (b.retired) {
          throw IntegrityError("logged grant touches a retired block");
        }
        auto candidate = b.spends;
        candidate.push_back(params);
        if (!FitsWithinTol(ledger.Compose(candidate), config.global)) {
          throw IntegrityError("logged grant was denied on replay");
        }
      }
      for (BlockId id : e.blocks) {
        ledger.blocks_[static_cast<size_t>(id)].spends.push_back(params);
      }
    } else if (e.kind == "retire") {
      for (BlockId id : e.blocks) {
        ledger.BlockRef(id);
        ledger.blocks_[static_cast<size_t>(id)].retired = true;
      }
    } else if (e.kind == "deny") {
      // Denials never changed state.
    } else {
      // Non-ledger producers (validators, scheduler) share the log format;
      // their records carry no ledger state.
    }
    // Keep the replayed log byte-identical to the original.
    ledger.log_.Append(e);
  }
  return ledger;
}

}  // namespace dpstream
