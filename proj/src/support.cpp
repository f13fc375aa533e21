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

#include <algorithm>
#include <atomic>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "hrtf_forge/log.hpp"
#include "hrtf_forge/parallel.hpp"

namespace hforge {

namespace {
std::atomic<int> g_threads{1};
std::atomic<log::Level> g_min_level{log::Level::Info};
std::mutex g_log_mutex;

const char* level_name(log::Level level) {
  switch (level) {
    case log::Level::Debug: return "debug";
    case log::Level::Info: return "info";
    case log::Level::Warn: return "warn";
    case log::Level::Error: return "error";
  }
  return "info";
}
}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body) {
  const std::ptrdiff_t count = end - begin;
  if (count <= 0) return;
  const int workers = static_cast<int>(std::min<std::ptrdiff_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::ptrdiff_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<std::ptrdiff_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::ptrdiff_t i = next.fetch_add(1);
      if (i >= end) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = end;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace log {

void set_min_level(Level level) { g_min_level = level; }
Level min_level() { return g_min_level; }

void write(Level level, std::string_view stage, std::string_view msg, std::string_view fields) {
  if (level < g_min_level.load()) return;
  std::string line = "level=";
  line += level_name(level);
  line += " stage=";
  line += stage;
  line += " msg=\"";
  for (char c : msg) line += (c == '"') ? '\'' : c;
  line += '"';
  if (!fields.empty()) {
    line += ' ';
    line += fields;
  }
  line += '\n';
  std::lock_guard lock(g_log_mutex);
  std::cerr << line;
}

}  // namespace log
}  // namespace hforge
