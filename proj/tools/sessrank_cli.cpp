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

// Command-line driver: corpus statistics, synthetic data, model fitting,
// grid search and evaluation.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sessrank.hpp"

namespace fs = std::filesystem;
using namespace sessrank;

namespace {

std::vector<Session> load_sessions(const fs::path& path,
                                   const std::string& rejects_path = {}) {
  auto parsed = parse_sessions(path);
  if (!parsed.rejects.empty()) {
    std::cerr << path.string() << ": " << parsed.rejects.size()
              << " malformed rows skipped\n";
  }
  if (!rejects_path.empty()) {
    write_atomically(rejects_path,
                     [&](std::ostream& out) { write_rejects(parsed.rejects, out); });
  }
  return std::move(parsed.sessions);
}

std::string stats_text(const CorpusStats& s) {
  std::ostringstream out;
  out << std::setprecision(12) << "n_sessions = " << s.n_sessions << '\n'
      << "n_users = " << s.n_users << '\n'
      << "n_actions = " << s.n_actions << '\n'
      << "mean_actions_per_session = " << s.mean_actions_per_session << '\n'
      << "std_actions_per_session = " << s.std_actions_per_session << '\n'
      << "max_actions_per_session = " << s.max_actions_per_session << '\n'
      << "clickout_last_ratio = " << s.clickout_last_ratio << '\n'
      << "mean_session_duration_seconds = " << s.mean_session_duration_seconds
      << '\n'
      << "filter_usage_ratio = " << s.filter_usage_ratio << '\n';
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  write_atomically(path, [&](std::ostream& out) { out << text; });
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return 1;
    case ErrorKind::kData: return 2;
    case ErrorKind::kDivergence: return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Session-based accommodation re-ranking"};
  app.require_subcommand(1);

  // stats
  auto* stats = app.add_subcommand("stats", "Descriptive statistics of a session log");
  std::string stats_in, stats_out, stats_rejects;
  stats->add_option("sessions", stats_in, "Session CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_out, "Also write the statistics here");
  stats->add_option("--rejects", stats_rejects, "Write the rejected-row report here");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus");
  SynthConfig synth;
  std::string gen_out;
  double holdout = 0.0;
  gen->add_option("--sessions", synth.n_sessions, "Number of sessions")->required();
  gen->add_option("--items", synth.n_items, "Number of accommodations")->required();
  gen->add_option("--p", synth.interact_then_click_prob,
                  "Probability of an interaction with the clicked item")->required();
  gen->add_option("--seed", synth.seed, "Random seed")->required();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--mean-len", synth.mean_session_len, "Mean events per session");
  gen->add_option("--cooccurrence", synth.cooccurrence_prob,
                  "Probability of an interaction with the clicked item's partner");
  gen->add_option("--distractor", synth.distractor_prob,
                  "Probability of an interaction with another displayed item");
  gen->add_option("--properties", synth.n_properties, "Metadata vocabulary size");
  gen->add_option("--holdout", holdout,
                  "Also write train.csv / valid.csv with this validation fraction");

  // split
  auto* split = app.add_subcommand("split", "Session-level train/validation split");
  std::string split_in, split_out;
  double split_fraction = 0.2;
  std::uint64_t split_seed = 1;
  split->add_option("--data", split_in, "Session CSV")->required()->check(CLI::ExistingFile);
  split->add_option("--fraction", split_fraction, "Validation fraction");
  split->add_option("--seed", split_seed, "Random seed");
  split->add_option("--out", split_out, "Output directory")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a co-occurrence or IKNN baseline");
  std::string fit_method, fit_train, fit_out, fit_aggregation = "last";
  fit->add_option("--method", fit_method, "ar, mc, sr or iknn")
      ->required()->check(CLI::IsMember({"ar", "mc", "sr", "iknn"}));
  fit->add_option("--train", fit_train, "Training session CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "Model file")->required();
  fit->add_option("--aggregation", fit_aggregation,
                  "History items used by ar/mc/sr: last or all")
      ->check(CLI::IsMember({"last", "all"}));

  // train-rnn
  auto* trn = app.add_subcommand("train-rnn", "Train the recurrent scorer");
  std::string trn_train, trn_meta, trn_config, trn_out, trn_log;
  bool trn_context = false;
  trn->add_option("--train", trn_train, "Training session CSV")->required()->check(CLI::ExistingFile);
  trn->add_option("--metadata", trn_meta, "Item metadata CSV")->check(CLI::ExistingFile);
  trn->add_flag("--context", trn_context, "Use device and platform");
  trn->add_option("--config", trn_config, "key = value hyper-parameter file")
      ->required()->check(CLI::ExistingFile);
  trn->add_option("--out", trn_out, "Checkpoint file")->required();
  trn->add_option("--loss-log", trn_log, "Write per-epoch losses here");

  // grid-search
  auto* grid = app.add_subcommand("grid-search", "Hyper-parameter grid search");
  std::string grid_train, grid_valid, grid_file, grid_out, grid_meta;
  bool grid_context = false;
  grid->add_option("--train", grid_train, "Training session CSV")->required()->check(CLI::ExistingFile);
  grid->add_option("--valid", grid_valid, "Validation session CSV")->required()->check(CLI::ExistingFile);
  grid->add_option("--grid", grid_file, "Grid file")->required()->check(CLI::ExistingFile);
  grid->add_option("--out", grid_out, "Report file")->required();
  grid->add_option("--metadata", grid_meta, "Item metadata CSV")->check(CLI::ExistingFile);
  grid->add_flag("--context", grid_context, "Use device and platform");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "MRR of a ranking method");
  std::string ev_method, ev_model, ev_meta, ev_data, ev_report, ev_submission;
  std::size_t ev_threads = 1;
  bool ev_all = false;
  ev->add_option("--method", ev_method, "Ranking method")
      ->required()
      ->check(CLI::IsMember({"identity", "rules", "ar", "mc", "sr", "iknn", "rnn",
                             "rnn+rules"}));
  ev->add_option("--model", ev_model, "Fitted model or checkpoint")->check(CLI::ExistingFile);
  ev->add_option("--metadata", ev_meta, "Item metadata CSV")->check(CLI::ExistingFile);
  ev->add_option("--data", ev_data, "Session CSV to evaluate on")->required()->check(CLI::ExistingFile);
  ev->add_option("--report", ev_report, "Report file")->required();
  ev->add_option("--submission", ev_submission, "Write a submission CSV here");
  ev->add_option("--threads", ev_threads, "Scoring threads")->check(CLI::PositiveNumber);
  ev->add_flag("--all-clickouts", ev_all,
               "Evaluate every clickout instead of the last one per session");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*stats) {
      const auto text = stats_text(compute_stats(load_sessions(stats_in, stats_rejects)));
      std::cout << text;
      if (!stats_out.empty()) write_text(stats_out, text);
    } else if (*gen) {
      const auto corpus = generate(synth);
      write_corpus(corpus, gen_out);
      if (holdout > 0.0) {
        const auto parts = split_train_validation(corpus.sessions, holdout, synth.seed);
        write_sessions(parts.train, fs::path(gen_out) / "train.csv");
        write_sessions(parts.validation, fs::path(gen_out) / "valid.csv");
      }
      std::cout << "wrote " << corpus.sessions.size() << " sessions to " << gen_out
                << '\n';
    } else if (*split) {
      const auto parts =
          split_train_validation(load_sessions(split_in), split_fraction, split_seed);
      fs::create_directories(split_out);
      write_sessions(parts.train, fs::path(split_out) / "train.csv");
      write_sessions(parts.validation, fs::path(split_out) / "valid.csv");
      std::cout << "train = " << parts.train.size()
                << "\nvalidation = " << parts.validation.size() << '\n';
    } else if (*fit) {
      const auto train = load_sessions(fit_train);
      const auto aggregation = fit_aggregation == "all" ? HistoryAggregation::kAllItems
                                                        : HistoryAggregation::kLastItem;
      write_atomically(fit_out, [&](std::ostream& out) {
        if (fit_method == "iknn") {
          save_model(fit_iknn(train), out);
          return;
        }
        auto model = fit_method == "ar"   ? fit_association_rules(train)
                     : fit_method == "mc" ? fit_markov(train)
                                          : fit_sequential_rules(train);
        model.set_aggregation(aggregation);
        save_model(model, out);
      });
    } else if (*trn) {
      const auto hp = neural::hyper_params_from(KeyValues::load(trn_config));
      const auto train = load_sessions(trn_train);
      std::unique_ptr<ItemMetadata> meta;
      if (!trn_meta.empty()) meta = std::make_unique<ItemMetadata>(parse_metadata(trn_meta));
      const auto context = neural::ContextEncoder::fit(train);
      const auto vocab = neural::build_vocabulary(train, hp.min_count);
      neural::TrainingInputs inputs;
      inputs.metadata = meta.get();
      inputs.context = trn_context ? &context : nullptr;
      inputs.on_epoch = [](std::size_t epoch, double loss) {
        std::cerr << "epoch " << epoch << " loss " << std::setprecision(8) << loss
                  << '\n';
      };
      const auto result = neural::train(extract_clickouts(train, false), hp, vocab, inputs);
      neural::save_checkpoint(result.model, fs::path(trn_out));
      if (!trn_log.empty()) {
        std::ostringstream log;
        log << std::setprecision(17);
        for (std::size_t i = 0; i < result.epoch_losses.size(); ++i) {
          log << "epoch." << i + 1 << " = " << result.epoch_losses[i] << '\n';
        }
        write_text(trn_log, log.str());
      }
    } else if (*grid) {
      const auto spec = neural::hyper_grid_from(KeyValues::load(grid_file));
      const auto train = load_sessions(grid_train);
      const auto valid = load_sessions(grid_valid);
      std::unique_ptr<ItemMetadata> meta;
      if (!grid_meta.empty()) meta = std::make_unique<ItemMetadata>(parse_metadata(grid_meta));
      const auto context = neural::ContextEncoder::fit(train);
      neural::TrainingInputs inputs;
      inputs.metadata = meta.get();
      inputs.context = grid_context ? &context : nullptr;
      const auto result = neural::grid_search(
          extract_clickouts(train, false), extract_clickouts(valid, true), spec,
          neural::build_vocabulary(train, spec.base.min_count), inputs,
          [](const neural::GridEntry& e) {
            std::cerr << neural::describe(e.params) << " mrr=" << e.mrr << '\n';
          });
      const auto text = neural::grid_report(result);
      write_text(grid_out, text);
      std::cout << text;
    } else if (*ev) {
      const auto data = load_sessions(ev_data);
      const auto instances = extract_clickouts(data, !ev_all);
      std::shared_ptr<const ItemMetadata> meta;
      if (!ev_meta.empty()) meta = std::make_shared<ItemMetadata>(parse_metadata(ev_meta));

      std::unique_ptr<Scorer> scorer;
      bool rules = false;
      if (ev_method == "identity" || ev_method == "rules") {
        scorer = std::make_unique<IdentityScorer>();
        rules = ev_method == "rules";
      } else {
        if (ev_model.empty()) throw usage_error("--method " + ev_method + " needs --model");
        if (ev_method == "rnn" || ev_method == "rnn+rules") {
          auto ranker = std::make_shared<neural::NeuralRanker>(
              neural::load_checkpoint(fs::path(ev_model)));
          if (ranker->params.shape.has_metadata() && meta == nullptr) {
            throw usage_error("this model was trained with metadata; pass --metadata");
          }
          scorer = std::make_unique<NeuralScorer>(ranker, meta);
          rules = ev_method == "rnn+rules";
        } else {
          auto model = load_baseline(fs::path(ev_model));
          const bool is_iknn = std::holds_alternative<IknnIndex>(model);
          if ((ev_method == "iknn") != is_iknn ||
              (!is_iknn && kind_name(std::get<CooccurrenceModel>(model).kind()) != ev_method)) {
            throw usage_error("model file does not hold a " + ev_method + " model");
          }
          scorer = std::make_unique<BaselineScorer>(std::move(model));
        }
      }
      std::vector<RankedList> rankings;
      auto report = evaluate(*scorer, rules, instances, ev_threads,
                             ev_submission.empty() ? nullptr : &rankings);
      report.method = ev_method;
      const auto text = to_key_value(report);
      write_text(ev_report, text);
      std::cout << text;
      if (!ev_submission.empty()) write_submission(instances, rankings, fs::path(ev_submission));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
