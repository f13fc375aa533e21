// Copyright 2026 The hrtf-forge Authors.
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

#pragma once

#include <string>
#include <string_view>

namespace hforge::log {

enum class Level { Debug, Info, Warn, Error };

// Line-oriented key=value records on stderr:
//   level=warn stage=bem msg="max edge exceeds lambda/6" f_hz=16000
void write(Level level, std::string_view stage, std::string_view msg, std::string_view fields = {});

inline void info(std::string_view stage, std::string_view msg, std::string_view fields = {}) {
  write(Level::Info, stage, msg, fields);
}
inline void warn(std::string_view stage, std::string_view msg, std::string_view fields = {}) {
  write(Level::Warn, stage, msg, fields);
}
inline void error(std::string_view stage, std::string_view msg, std::string_view fields = {}) {
  write(Level::Error, stage, msg, fields);
}

void set_min_level(Level level);
Level min_level();

}  // namespace hforge::log
