// Copyright 2026 The structseq Authors
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


#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "structseq/candidates.hpp"
#include "structseq/errors.hpp"
#include "structseq/evaluation.hpp"
#include "structseq/inference.hpp"
#include "structseq/model_io.hpp"
#include "structseq/parallel.hpp"
#include "structseq/random.hpp"
#include "structseq/synthdata.hpp"
#include "structseq/training.hpp"

namespace structseq::cli {

namespace {

// Missing or unwritable files; reported like data-format errors.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buffer;
  body(buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << buffer.str();
  if (!out) throw IoError("failed writing '" + path + "'");
}

Vocabulary load_vocabulary(const std::string& explicit_path, const std::string& data_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    path = (std::filesystem::path(data_path).parent_path() / "vocab.txt").string();
  }
  auto in = open_input(path);
  return Vocabulary::read(in);
}

Dataset load_dataset(const std::string& path, const Vocabulary& vocab) {
  auto in = open_input(path);
  return parse_dataset(in, vocab);
}

AnyModel load_model(const std::string& path) {
  auto in = open_input(path);
  return read_model(in);
}

LinearModel load_linear(const std::string& path) {
  auto model = load_model(path);
  if (!std::holds_alternative<LinearModel>(model)) {
    throw FormatError("'" + path + "' is not a LINEAR model");
  }
  return std::get<LinearModel>(std::move(model));
}

NetworkModel load_network(const std::string& path) {
  auto model = load_model(path);
  if (!std::holds_alternative<NetworkModel>(model)) {
    throw FormatError("'" + path + "' is not an SDNN model");
  }
  return std::get<NetworkModel>(std::move(model));
}

std::vector<CandidateSet> load_candidates(const std::string& path, const Vocabulary& vocab) {
  auto in = open_input(path);
  return read_candidates(in, vocab);
}

void check_model_fits(std::size_t k, std::size_t d, const Dataset& data) {
  if (k != data.vocabulary().size()) throw ShapeError("model K does not match the vocabulary");
  for (const auto& utt : data.utterances()) {
    if (utt.x().dim() != d) throw ShapeError("utterance '" + utt.id() + "' dimension does not match the model");
  }
}

std::string command_line(std::span<const std::string> args) {
  std::string line = "# structseq";
  for (const auto& a : args) line += " " + a;
  return line + "\n";
}

struct Options {
  // gen-data
  std::string out_dir;
  std::size_t k = 5, dim = 8, num_train = 200, num_test = 50, min_len = 20, max_len = 40;
  double noise_std = 0.8, self_loop = 0.8;
  // shared
  std::string data, vocab, model, out, report, candidates, generator, hyp, ref;
  std::uint64_t seed = 0;
  std::size_t epochs = 30;
  double lr = -1.0;
  double heldout = -1.0;
  std::size_t n = 50;
  // train-sdnn
  std::string mode, loss = "bce", accuracy = "frame", metric;
  std::size_t layers = 1, hidden = 64, nbest = 50, restarts = 4, max_passes = 50, order = 1;
  long long num_random = -1;
  bool random_from_pool = false;
};

int gen_data(const Options& o, std::ostream& out) {
  GeneratorSpec spec;
  spec.num_labels = o.k;
  spec.dim = o.dim;
  spec.min_len = o.min_len;
  spec.max_len = o.max_len;
  spec.emission_std = o.noise_std;
  spec.num_utterances = o.num_train + o.num_test;
  spec.seed = o.seed;
  spec.transition = GeneratorSpec::self_loop_transition(o.k, o.self_loop);
  spec.emission_means = GeneratorSpec::random_means(o.k, o.dim, GeneratorSpec::means_seed(o.seed));
  const Dataset all = generate(spec);
  std::vector<Utterance> train(all.utterances().begin(), all.utterances().begin() + static_cast<std::ptrdiff_t>(o.num_train));
  std::vector<Utterance> test(all.utterances().begin() + static_cast<std::ptrdiff_t>(o.num_train), all.utterances().end());

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  write_file((dir / "vocab.txt").string(), [&](std::ostream& s) { all.vocabulary().write(s); });
  write_file((dir / "train.txt").string(),
             [&](std::ostream& s) { serialize_dataset(s, Dataset(all.vocabulary(), std::move(train))); });
  write_file((dir / "test.txt").string(),
             [&](std::ostream& s) { serialize_dataset(s, Dataset(all.vocabulary(), std::move(test))); });
  out << "wrote " << o.num_train << " train and " << o.num_test << " test utterances to " << o.out_dir << "\n";
  return kSuccess;
}

int train_linear_cmd(const Options& o, std::span<const std::string> args, std::ostream& out) {
  const Vocabulary vocab = load_vocabulary(o.vocab, o.data);
  const Dataset data = load_dataset(o.data, vocab);
  LinearTrainConfig config;
  config.epochs = o.epochs;
  config.seed = o.seed;
  if (o.lr >= 0.0) config.learning_rate = o.lr;
  if (o.heldout >= 0.0) config.heldout_fraction = o.heldout;
  auto [model, report] = train_linear(data, config);
  write_file(o.out, [&](std::ostream& s) { write_linear_model(s, model); });
  if (!o.report.empty()) {
    write_file(o.report, [&](std::ostream& s) {
      s << command_line(args);
      write_report_csv(s, report);
    });
  }
  out << "trained linear model on " << data.size() << " utterances\n";
  return kSuccess;
}

int nbest_cmd(const Options& o, std::ostream& out) {
  const Vocabulary vocab = load_vocabulary(o.vocab, o.data);
  const Dataset data = load_dataset(o.data, vocab);
  const LinearModel model = load_linear(o.model);
  check_model_fits(model.num_labels, model.dim, data);
  if (o.n == 0) throw CLI::ValidationError("--n", "must be at least 1");
  std::vector<CandidateSet> sets(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    sets[i] = nbest_linear(data[i].x(), model, o.n);
    sets[i].utt_id = data[i].id();
  });
  write_file(o.out, [&](std::ostream& s) { write_candidates(s, sets, vocab); });
  out << "wrote " << o.n << "-best lists for " << data.size() << " utterances\n";
  return kSuccess;
}

int train_sdnn_cmd(const Options& o, std::span<const std::string> args, std::ostream& out) {
  const Vocabulary vocab = load_vocabulary(o.vocab, o.data);
  const Dataset data = load_dataset(o.data, vocab);
  TrainConfig config;
  config.mode = o.mode == "lattice" ? TrainMode::WithLattice : TrainMode::WithoutLattice;
  config.hidden_layers = o.layers;
  config.hidden = o.hidden;
  config.epochs = o.epochs;
  if (o.lr >= 0.0) config.learning_rate = o.lr;
  config.loss_form = o.loss == "paper" ? LossForm::Paper : LossForm::Bce;
  config.order = o.order == 2 ? FeatureOrder::Second : FeatureOrder::First;
  config.nbest = o.nbest;
  config.num_random = o.num_random >= 0 ? static_cast<std::size_t>(o.num_random)
                      : config.mode == TrainMode::WithLattice ? o.nbest
                                                              : std::size_t{10};
  config.restarts = o.restarts;
  config.max_passes = o.max_passes;
  config.accuracy = o.accuracy == "phone" ? AccuracyVariant::Phone : AccuracyVariant::Frame;
  if (o.heldout >= 0.0) config.heldout_fraction = o.heldout;
  config.random_from_nbest_pool = o.random_from_pool;
  config.seed = o.seed;

  std::pair<NetworkModel, TrainReport> result;
  if (config.mode == TrainMode::WithLattice) {
    if (o.generator.empty()) throw CLI::RequiredError("--generator is required with --mode lattice");
    const LinearModel generator = load_linear(o.generator);
    check_model_fits(generator.num_labels, generator.dim, data);
    result = train_sdnn_with_lattice(data, generator, config);
  } else {
    result = train_sdnn_without_lattice(data, config);
  }
  write_file(o.out, [&](std::ostream& s) { write_network_model(s, result.first); });
  if (!o.report.empty()) {
    write_file(o.report, [&](std::ostream& s) {
      s << command_line(args);
      write_report_csv(s, result.second);
    });
  }
  out << "trained network " << result.first.layer_sizes().size() - 2 << "x" << o.hidden << " for "
      << config.epochs << " epochs\n";
  return kSuccess;
}

int infer_cmd(const Options& o, std::ostream& out) {
  const Vocabulary vocab = load_vocabulary(o.vocab, o.data);
  const Dataset data = load_dataset(o.data, vocab);
  const AnyModel model = load_model(o.model);

  std::unique_ptr<Scorer> scorer;
  const LinearModel* linear = std::get_if<LinearModel>(&model);
  if (linear) {
    check_model_fits(linear->num_labels, linear->dim, data);
    scorer = std::make_unique<LinearScorer>(*linear);
  } else {
    const auto& net = std::get<NetworkModel>(model);
    check_model_fits(net.num_labels, net.dim, data);
    scorer = std::make_unique<NetworkScorer>(net);
  }

  std::vector<CandidateSet> candidate_sets;
  std::unordered_map<std::string, const CandidateSet*> by_id;
  if (o.mode == "candidates") {
    if (o.candidates.empty()) throw CLI::RequiredError("--candidates is required with --mode candidates");
    candidate_sets = load_candidates(o.candidates, vocab);
    for (const auto& set : candidate_sets) by_id.emplace(set.utt_id, &set);
  }
  if (o.mode == "viterbi" && !linear) throw CLI::ValidationError("--mode", "viterbi needs a LINEAR model");

  std::vector<Hypothesis> hyps(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const Utterance& utt = data[i];
    InferenceResult result;
    if (o.mode == "bruteforce") {
      result = brute_force(utt.x(), *scorer);
    } else if (o.mode == "viterbi") {
      result = viterbi_linear(utt.x(), *linear);
    } else if (o.mode == "coord") {
      const std::uint64_t useed = derive_seed(o.seed, i);
      Rng rng(useed);
      std::uniform_int_distribution<Label> pick(0, static_cast<Label>(vocab.size()) - 1);
      LabelSequence init(utt.frames());
      for (Label& l : init) l = pick(rng);
      CoordinateAscentOptions opts{o.max_passes, o.restarts, derive_seed(useed, 1)};
      result = coordinate_ascent(utt.x(), *scorer, init, opts);
    } else {
      auto it = by_id.find(utt.id());
      if (it == by_id.end()) throw ShapeError("no candidates for utterance '" + utt.id() + "'");
      result = rescore_candidates(utt.x(), it->second->sequences(), *scorer);
    }
    hyps[i] = Hypothesis{utt.id(), std::move(result.labels)};
  });
  write_file(o.out, [&](std::ostream& s) { serialize_hypotheses(s, hyps, vocab); });
  out << "decoded " << hyps.size() << " utterances\n";
  return kSuccess;
}

int evaluate_cmd(const Options& o, std::ostream& out) {
  const Vocabulary vocab = load_vocabulary(o.vocab, o.ref);
  const Dataset ref = load_dataset(o.ref, vocab);
  auto in = open_input(o.hyp);
  const std::vector<Hypothesis> hyps = parse_hypotheses(in, vocab);
  const double rate = evaluate(hyps, ref, o.metric == "phone" ? ErrorMetric::Phone : ErrorMetric::Frame);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f\n", rate);
  out << buf;
  return kSuccess;
}

int study_cmd(const Options& o, std::span<const std::string> args, std::ostream& out) {
  const Vocabulary vocab = load_vocabulary(o.vocab, o.data);
  const Dataset data = load_dataset(o.data, vocab);
  const auto sets = load_candidates(o.candidates, vocab);
  const NetworkModel model = load_network(o.model);
  check_model_fits(model.num_labels, model.dim, data);
  const SelectionReport report = selection_study(data, sets, model, o.seed);
  write_file(o.out, [&](std::ostream& s) {
    s << command_line(args);
    write_selection_csv(s, report);
  });
  write_selection_csv(out, report);
  return kSuccess;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured sequence labeling: linear and network scorers over joint features"};
  app.name("structseq");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus from a planted HMM");
  gen->add_option("--out", o.out_dir, "Output directory (vocab.txt, train.txt, test.txt)")->required();
  gen->add_option("--k", o.k, "Number of labels")->check(CLI::PositiveNumber);
  gen->add_option("--dim", o.dim, "Acoustic dimension")->check(CLI::PositiveNumber);
  gen->add_option("--num-train", o.num_train, "Training utterances");
  gen->add_option("--num-test", o.num_test, "Test utterances");
  gen->add_option("--min-len", o.min_len, "Minimum utterance length");
  gen->add_option("--max-len", o.max_len, "Maximum utterance length");
  gen->add_option("--std", o.noise_std, "Emission noise standard deviation");
  gen->add_option("--self-loop", o.self_loop, "Self-transition probability");
  gen->add_option("--seed", o.seed, "Random seed");

  auto* tl = app.add_subcommand("train-linear", "Train the linear baseline (averaged structured perceptron)");
  tl->add_option("--data", o.data, "Training dataset")->required();
  tl->add_option("--vocab", o.vocab, "Vocabulary file (default: vocab.txt beside --data)");
  tl->add_option("--epochs", o.epochs, "Epochs")->check(CLI::PositiveNumber);
  tl->add_option("--lr", o.lr, "Perceptron step size (default 1.0)");
  tl->add_option("--seed", o.seed, "Random seed");
  tl->add_option("--out", o.out, "Output model file")->required();
  tl->add_option("--report", o.report, "Per-epoch CSV report");
  tl->add_option("--heldout", o.heldout, "Held-out fraction (default 0)");

  auto* nb = app.add_subcommand("nbest", "Write exact N-best lists under a linear model");
  nb->add_option("--data", o.data, "Dataset")->required();
  nb->add_option("--vocab", o.vocab, "Vocabulary file (default: vocab.txt beside --data)");
  nb->add_option("--model", o.model, "LINEAR model file")->required();
  nb->add_option("--n", o.n, "List size")->check(CLI::PositiveNumber);
  nb->add_option("--out", o.out, "Output candidate file")->required();

  auto* ts = app.add_subcommand("train-sdnn", "Train the structured network scorer");
  ts->add_option("--data", o.data, "Training dataset")->required();
  ts->add_option("--vocab", o.vocab, "Vocabulary file (default: vocab.txt beside --data)");
  ts->add_option("--mode", o.mode, "lattice | nolattice")->required()->check(CLI::IsMember({"lattice", "nolattice"}));
  ts->add_option("--layers", o.layers, "Hidden layers L");
  ts->add_option("--hidden", o.hidden, "Hidden width")->check(CLI::PositiveNumber);
  ts->add_option("--epochs", o.epochs, "Epochs")->check(CLI::PositiveNumber);
  ts->add_option("--lr", o.lr, "Learning rate (default 0.05)");
  ts->add_option("--loss", o.loss, "paper | bce")->check(CLI::IsMember({"paper", "bce"}));
  ts->add_option("--order", o.order, "Feature order 1 | 2")->check(CLI::IsMember({1, 2}));
  ts->add_option("--nbest", o.nbest, "N-best size for lattice training");
  ts->add_option("--num-random", o.num_random, "Random negatives per utterance (default: N with lattice, 10 without)");
  ts->add_option("--restarts", o.restarts, "Coordinate-ascent restarts");
  ts->add_option("--max-passes", o.max_passes, "Coordinate-ascent pass limit")->check(CLI::PositiveNumber);
  ts->add_option("--accuracy", o.accuracy, "frame | phone")->check(CLI::IsMember({"frame", "phone"}));
  ts->add_option("--generator", o.generator, "LINEAR model that seeds the N-best lists");
  ts->add_option("--heldout", o.heldout, "Held-out fraction (default 0.1)");
  ts->add_flag("--random-from-nbest-pool", o.random_from_pool, "Draw random negatives from N-best ranks [N, 4N)");
  ts->add_option("--seed", o.seed, "Random seed");
  ts->add_option("--out", o.out, "Output model file")->required();
  ts->add_option("--report", o.report, "Per-epoch CSV report");

  auto* inf = app.add_subcommand("infer", "Decode a dataset");
  inf->add_option("--data", o.data, "Dataset")->required();
  inf->add_option("--vocab", o.vocab, "Vocabulary file (default: vocab.txt beside --data)");
  inf->add_option("--model", o.model, "LINEAR or SDNN model file")->required();
  inf->add_option("--mode", o.mode, "bruteforce | coord | candidates | viterbi")
      ->required()
      ->check(CLI::IsMember({"bruteforce", "coord", "candidates", "viterbi"}));
  inf->add_option("--candidates", o.candidates, "Candidate file for --mode candidates");
  inf->add_option("--restarts", o.restarts, "Coordinate-ascent restarts");
  inf->add_option("--max-passes", o.max_passes, "Coordinate-ascent pass limit")->check(CLI::PositiveNumber);
  inf->add_option("--seed", o.seed, "Random seed");
  inf->add_option("--out", o.out, "Output hypothesis file")->required();

  auto* ev = app.add_subcommand("evaluate", "Pooled error rate of hypotheses against references");
  ev->add_option("--hyp", o.hyp, "Hypothesis file")->required();
  ev->add_option("--ref", o.ref, "Reference dataset")->required();
  ev->add_option("--vocab", o.vocab, "Vocabulary file (default: vocab.txt beside --ref)");
  ev->add_option("--metric", o.metric, "frame | phone")->required()->check(CLI::IsMember({"frame", "phone"}));

  auto* st = app.add_subcommand("study", "Oracle/random/network selection over candidate sets");
  st->add_option("--data", o.data, "Dataset with references")->required();
  st->add_option("--vocab", o.vocab, "Vocabulary file (default: vocab.txt beside --data)");
  st->add_option("--candidates", o.candidates, "Candidate file")->required();
  st->add_option("--model", o.model, "SDNN model file")->required();
  st->add_option("--seed", o.seed, "Random seed");
  st->add_option("--out", o.out, "Output CSV")->required();

  std::vector<const char*> argv{"structseq"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  try {
    if (gen->parsed()) return gen_data(o, out);
    if (tl->parsed()) return train_linear_cmd(o, args, out);
    if (nb->parsed()) return nbest_cmd(o, out);
    if (ts->parsed()) return train_sdnn_cmd(o, args, out);
    if (inf->parsed()) return infer_cmd(o, out);
    if (ev->parsed()) return evaluate_cmd(o, out);
    if (st->parsed()) return study_cmd(o, args, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << "\n";
    return kDataFormat;
  } catch (const ShapeError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataFormat;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kDataFormat;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kDataFormat;
  }
  err << app.help();
  return kUsage;
}

}  // namespace structseq::cli
