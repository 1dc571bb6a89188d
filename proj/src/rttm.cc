// Copyright 2026 The gmmdiar Authors
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

#include "gmmdiar/rttm.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gmmdiar/common.h"

namespace gmmdiar {

void write_rttm(std::ostream& os, const Diarization& diarization) {
  char buf[64];
  for (const Turn& t : diarization.turns) {
    os << "SPEAKER " << diarization.file_id << " 1 ";
    std::snprintf(buf, sizeof buf, "%.3f %.3f", t.onset_s, t.duration_s);
    os << buf << " <NA> <NA> " << t.speaker << " <NA> <NA>\n";
  }
  if (!os) throw Error(ErrorCode::kIo, "RTTM write failed");
}

std::string to_rttm(const Diarization& diarization) {
  std::ostringstream os;
  write_rttm(os, diarization);
  return os.str();
}

Diarization read_rttm(std::istream& is) {
  Diarization out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string type;
    if (!(fields >> type) || type != "SPEAKER") continue;
    std::string file_id, channel, ortho, stype, label;
    Turn turn;
    if (!(fields >> file_id >> channel >> turn.onset_s >> turn.duration_s >> ortho >> stype >> label)) {
      throw Error(ErrorCode::kMalformedHeader, "RTTM line " + std::to_string(line_no) + " is incomplete");
    }
    if (out.file_id.empty()) out.file_id = file_id;
    turn.speaker = label;
    out.turns.push_back(turn);
  }
  return out;
}

Diarization read_rttm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, path);
  return read_rttm(in);
}

LabeledTimeline to_timeline(const Diarization& diarization) {
  LabeledTimeline tl;
  for (const Turn& t : diarization.turns) tl.entries.push_back({t.onset_s, t.onset_s + t.duration_s, t.speaker});
  return tl;
}

}  // namespace gmmdiar
