/*
 * Copyright 2026 The sessrank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sessrank/csv.hpp"
#include "sessrank/error.hpp"
#include "sessrank/io.hpp"
#include "sessrank/ranked_list.hpp"
#include "sessrank/session.hpp"

namespace sessrank {

inline double reciprocal_rank(const RankedList& ranked, const std::string& truth) {
  const auto it = std::find(ranked.items.begin(), ranked.items.end(), truth);
  if (it == ranked.items.end()) throw data_error("truth not in impressions");
  return 1.0 / static_cast<double>(it - ranked.items.begin() + 1);
}

struct EvalReport {
  std::string method;
  std::size_t n_instances = 0;  // valid instances entering the mean
  std::size_t n_invalid = 0;    // no truth, or truth not among impressions
  double mrr = 0.0;
  std::vector<double> reciprocal_ranks;  // per valid instance, input order
};

using RankingFn = std::function<RankedList(const ClickoutInstance&)>;

// Runs `rank` over the instances (optionally on several threads) and reduces
// reciprocal ranks in input order, so the result is independent of the
// thread count. Rankings are returned through `rankings` when requested.
inline EvalReport evaluate(const std::string& method,
                           const std::vector<ClickoutInstance>& instances,
                           const RankingFn& rank, std::size_t threads = 1,
                           std::vector<RankedList>* rankings = nullptr) {
  const std::size_t n = instances.size();
  std::vector<RankedList> ranked(n);
  std::vector<std::optional<double>> rr(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ranked[i] = rank(instances[i]);
      const auto& truth = instances[i].truth;
      if (!truth) continue;
      const auto& items = ranked[i].items;
      if (std::find(items.begin(), items.end(), *truth) == items.end()) continue;
      rr[i] = reciprocal_rank(ranked[i], *truth);
    }
  };

  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(std::min(n, t * chunk), std::min(n, (t + 1) * chunk));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EvalReport report;
  report.method = method;
  double sum = 0.0;
  for (const auto& v : rr) {
    if (!v) {
      ++report.n_invalid;
      continue;
    }
    report.reciprocal_ranks.push_back(*v);
    sum += *v;
  }
  report.n_instances = report.reciprocal_ranks.size();
  if (report.n_instances == 0) throw data_error("no valid instances to evaluate");
  report.mrr = sum / static_cast<double>(report.n_instances);
  if (rankings != nullptr) *rankings = std::move(ranked);
  return report;
}

inline std::string to_key_value(const EvalReport& report) {
  std::ostringstream out;
  out << "method = " << report.method << '\n'
      << "n_instances = " << report.n_instances << '\n'
      << "n_invalid = " << report.n_invalid << '\n'
      << "mrr = " << std::setprecision(12) << report.mrr << '\n';
  return out.str();
}

// --- Challenge submission files -------------------------------------------

inline constexpr std::string_view kSubmissionHeader =
    "user_id,session_id,timestamp,step,item_recommendations";

struct SubmissionRow {
  std::string user_id;
  std::string session_id;
  std::int64_t timestamp = 0;
  std::int64_t step = 0;
  std::vector<std::string> items;

  bool operator==(const SubmissionRow&) const = default;
};

inline void write_submission(const std::vector<ClickoutInstance>& instances,
                             const std::vector<RankedList>& rankings,
                             std::ostream& out) {
  if (instances.size() != rankings.size()) {
    throw usage_error("submission: instance/ranking count mismatch");
  }
  out << kSubmissionHeader << '\n';
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    out << csv::quote(inst.user_id) << ',' << csv::quote(inst.session_id) << ','
        << inst.clickout.timestamp << ',' << inst.clickout.step << ','
        << csv::join(rankings[i].items, ' ') << '\n';
  }
}

inline void write_submission(const std::vector<ClickoutInstance>& instances,
                             const std::vector<RankedList>& rankings,
                             const std::filesystem::path& path) {
  if (instances.size() != rankings.size()) {
    throw usage_error("submission: instance/ranking count mismatch");
  }
  write_atomically(path, [&](std::ostream& out) {
    write_submission(instances, rankings, out);
  });
}

inline std::vector<SubmissionRow> read_submission(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw data_error("missing submission header");
  std::vector<SubmissionRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (!f || f->size() != 5) throw data_error("malformed submission row");
    const auto ts = csv::parse_int((*f)[2]);
    const auto step = csv::parse_int((*f)[3]);
    if (!ts || !step) throw data_error("malformed submission row");
    rows.push_back({(*f)[0], (*f)[1], *ts, *step, csv::split_list((*f)[4], ' ')});
  }
  return rows;
}

}  // namespace sessrank
