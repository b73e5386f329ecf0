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

#include "dpstream/event_log.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dpstream {

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) {
    throw std::runtime_error("double formatting failed");
  }
  return std::string(buf, res.ptr);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad double: " + s);
  }
  return v;
}

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string FormatEvent(const Event& e) {
  std::ostringstream os;
  os << e.kind << '\t' << e.time << '\t' << e.actor << '\t'
     << FormatDouble(e.epsilon) << '\t' << FormatDouble(e.delta) << '\t';
  if (e.blocks.empty()) {
    os << '-';
  } else {
    for (size_t i = 0; i < e.blocks.size(); ++i) {
      if (i > 0) os << ',';
      os << e.blocks[i];
    }
  }
  os << '\t' << e.extra;
  return os.str();
}

Event ParseEvent(const std::string& line) {
  auto fields = SplitTabs(line);
  if (fields.size() != 7) {
    throw std::invalid_argument("malformed event line: " + line);
  }
  Event e;
  e.kind = fields[0];
  e.time = std::stoll(fields[1]);
  e.actor = fields[2];
  e.epsilon = ParseDouble(fields[3]);
  e.delta = ParseDouble(fields[4]);
  if (fields[5] != "-") {
    std::stringstream ss(fields[5]);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      e.blocks.push_back(std::stoll(tok));
    }
  }
  e.extra = fields[6];
  return e;
}

void EventLog::WriteTo(std::ostream& os) const {
  for (const auto& e : events_) {
    os << FormatEvent(e) << '\n';
  }
}

EventLog EventLog::ReadFrom(std::istream& is) {
  EventLog log;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    log.Append(ParseEvent(line));
  }
  return log;
}

}  // namespace dpstream
