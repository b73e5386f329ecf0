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

#ifndef DPSTREAM_EVENT_LOG_HPP_
#define DPSTREAM_EVENT_LOG_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpstream {

// Shortest round-trip decimal form of a double; keeps logs and tables
// byte-identical across runs with the same seed.
std::string FormatDouble(double v);
double ParseDouble(const std::string& s);

// One line of the run's event log. Ledger events (append / grant / deny /
// retire) are replayable; other producers (validators, trainers, scheduler)
// share the same line format with their payload in `extra`.
struct Event {
  std::string kind;
  int64_t time = 0;
  std::string actor = "-";
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<int64_t> blocks;
  std::string extra = "-";
};

std::string FormatEvent(const Event& e);
Event ParseEvent(const std::string& line);

// Append-only event sink.
class EventLog {
 public:
  void Append(Event e) { events_.push_back(std::move(e)); }
  const std::vector<Event>& events() const { return events_; }
  void WriteTo(std::ostream& os) const;
  static EventLog ReadFrom(std::istream& is);

 private:
  std::vector<Event> events_;
};

}  // namespace dpstream

#endif  // DPSTREAM_EVENT_LOG_HPP_
