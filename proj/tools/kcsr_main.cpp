#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kcsr/data_io.hpp"
#include "kcsr/dp_oracle.hpp"
#include "kcsr/errors.hpp"
#include "kcsr/metrics.hpp"
#include "kcsr/segmenter.hpp"

namespace {

using namespace kcsr;

struct SegmentArgs {
  std::vector<std::string> inputs;
  int k = 2;
  std::string method = "kcsr";
  double alpha = 10.0;
  double lambda = -1.0;  // negative: auto
  std::string kernel = "rbf";
  std::string sigma = "auto";
  int batch = 256;
  int iters = 0;  // 0: ceil(50n/b)
  double eta0 = 1.0;
  double rho = 0.999;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  double epsilon = 1e-6;
  int max_iters = 500;
  std::string output;
  std::string label_col;
  bool header = false;
  std::string delimiter = ",";
  std::string trace_out;
};

struct SynthArgs {
  std::string out;
  std::vector<int> counts;
  std::vector<double> radii;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string label_col = "-1";
  bool header = false;
  std::string delimiter = ",";
};

struct OracleArgs {
  std::string input;
  int k = 2;
  std::string kernel = "rbf";
  std::string sigma = "auto";
  std::string label_col;
  bool header = false;
  std::string delimiter = ",";
  std::string output;
};

char parse_delimiter(const std::string& d) {
  if (d.size() != 1) throw InputError("--delimiter must be a single character");
  return d[0];
}

KernelKind parse_kernel(const std::string& k) {
  if (k == "rbf") return KernelKind::rbf;
  if (k == "linear") return KernelKind::linear;
  throw InputError("unknown kernel '" + k + "' (expected rbf or linear)");
}

std::optional<double> parse_sigma(const std::string& s) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("--sigma must be a number or 'auto'");
  }
}

CsvOptions csv_options(const std::string& label_col, bool header, const std::string& delim) {
  CsvOptions opt;
  opt.delimiter = parse_delimiter(delim);
  opt.has_header = header;
  if (!label_col.empty()) opt.label_column = label_col;
  return opt;
}

void write_trace_files(const std::string& prefix, const SegmentationResult& r) {
  {
    std::ofstream out(prefix + ".trace.csv");
    if (!out) throw InputError("cannot write trace file: " + prefix + ".trace.csv");
    out << "iteration,J\n";
    for (const auto& [it, val] : r.objective_trace) out << it << ',' << val << '\n';
  }
  {
    std::ofstream out(prefix + ".tau.csv");
    if (!out) throw InputError("cannot write tau file: " + prefix + ".tau.csv");
    out << "j,tau\n";
    for (Eigen::Index j = 0; j < r.tau.size(); ++j) out << (j + 1) << ',' << r.tau(j) << '\n';
  }
}

void print_summary(const SegmentationResult& r, double wall_seconds) {
  std::printf("method %s k %d\n", r.method.c_str(), r.k);
  // resolved kernel parameters, so heuristic-driven runs can be repeated
  if (r.kernel.kind == KernelKind::rbf) {
    std::printf("kernel rbf sigma %.17g\n", r.kernel.sigma);
  } else {
    std::printf("kernel linear\n");
  }
  std::printf("lambda %.17g\n", r.lambda);
  std::printf("boundaries:");
  for (int b : r.boundaries) std::printf(" %d", b);
  std::printf("\n");
  const double final_j =
      r.objective_trace.empty() ? 0.0 : r.objective_trace.back().second;
  std::printf("final J %.6g\n", final_j);
  std::printf("wall time %.3f s\n", wall_seconds);
  for (const std::string& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

std::size_t mem_cap_from_env() {
  if (const char* env = std::getenv("KCSR_MEM_CAP_BYTES")) {
    try {
      return static_cast<std::size_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw InputError("KCSR_MEM_CAP_BYTES is not a valid byte count");
    }
  }
  return std::size_t{2} << 30;
}

int cmd_segment(const SegmentArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();

  SegmentationRequest req;
  req.k = a.k;
  req.kernel_kind = parse_kernel(a.kernel);
  req.sigma = parse_sigma(a.sigma);
  req.alpha = a.alpha;
  if (a.lambda >= 0.0) req.lambda = a.lambda;
  req.mem_cap_bytes = mem_cap_from_env();

  if (a.method == "kcsr") {
    req.method = Method::kcsr;
    GDConfig gd;
    gd.epsilon = a.epsilon;
    gd.max_iters = a.max_iters;
    req.opt = gd;
  } else if (a.method == "skcsr" || a.method == "mkcsr") {
    req.method = a.method == "skcsr" ? Method::skcsr : Method::mkcsr;
    SGDConfig sgd;
    sgd.batch_b = a.batch;
    sgd.iterations_T = a.iters;
    sgd.eta0 = a.eta0;
    sgd.rho = a.rho;
    sgd.momentum_mu = a.momentum;
    sgd.seed = a.seed;
    req.opt = sgd;
  } else {
    throw InputError("unknown method '" + a.method + "'");
  }

  const CsvOptions copt = csv_options(a.label_col, a.header, a.delimiter);

  if (req.method == Method::mkcsr) {
    if (a.inputs.size() < 2) {
      throw InputError("mkcsr needs at least two --input files");
    }
    std::vector<DataSequence> blocks;
    for (const std::string& path : a.inputs) blocks.push_back(read_csv_sequence(path, copt));
    const MkcsrResult res = mkcsr_segment(blocks, req);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_summary(res.global, wall);
    for (std::size_t p = 0; p < res.per_sequence.size(); ++p) {
      std::printf("sequence %zu boundaries:", p + 1);
      for (int b : res.per_sequence[p].boundaries) std::printf(" %d", b);
      std::printf("\n");
    }
    if (!a.output.empty()) {
      write_result_json(res.global, a.output);
      for (std::size_t p = 0; p < res.per_sequence.size(); ++p) {
        write_result_json(res.per_sequence[p], a.output + ".seq" + std::to_string(p + 1) + ".json");
      }
    }
    if (!a.trace_out.empty()) write_trace_files(a.trace_out, res.global);
    return 0;
  }

  if (a.inputs.size() != 1) {
    throw InputError("method " + a.method + " takes exactly one --input");
  }
  const DataSequence X = read_csv_sequence(a.inputs.front(), copt);
  const SegmentationResult res =
      req.method == Method::kcsr ? kcsr_segment(X, req) : skcsr_segment(X, req);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_summary(res, wall);
  if (!a.output.empty()) write_result_json(res, a.output);
  if (!a.trace_out.empty()) write_trace_files(a.trace_out, res);
  return 0;
}

int cmd_synth(const SynthArgs& a) {
  std::vector<double> radii = a.radii.empty() ? std::vector<double>{1, 2, 3, 4} : a.radii;
  std::vector<int> counts = a.counts;
  if (counts.empty()) {
    // Default protocol: one count per circle, uniform in [500,1500], all
    // distinct.
    std::mt19937_64 rng(a.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_int_distribution<int> dist(500, 1500);
    std::set<int> seen;
    while (counts.size() < radii.size()) {
      const int c = dist(rng);
      if (seen.insert(c).second) counts.push_back(c);
    }
  }
  if (counts.size() != radii.size()) {
    throw InputError("--counts and --radii must have the same length");
  }
  const DataSequence X = generate_circles(counts, radii, a.noise, a.seed);
  write_csv_sequence(X, a.out, true);
  std::printf("counts:");
  for (int c : counts) std::printf(" %d", c);
  std::printf("\nwrote %d samples to %s\n", X.length(), a.out.c_str());
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  const SegmentationResult pred = read_result_json(a.pred);
  const CsvOptions copt = csv_options(a.label_col, a.header, a.delimiter);
  const DataSequence truth = read_csv_sequence(a.truth, copt);
  if (!truth.has_labels()) {
    throw InputError("truth csv has no label column (use --label-col)");
  }
  const double acc = accuracy(pred.labels, truth.truth_labels);
  const double mi = nmi(pred.labels, truth.truth_labels);
  std::printf("ACC %.4f NMI %.4f\n", acc, mi);
  return 0;
}

int cmd_oracle(const OracleArgs& a) {
  const CsvOptions copt = csv_options(a.label_col, a.header, a.delimiter);
  const DataSequence X = read_csv_sequence(a.input, copt);
  KernelSpec spec{parse_kernel(a.kernel), 1.0};
  if (spec.kind == KernelKind::rbf) {
    const auto sigma = parse_sigma(a.sigma);
    spec.sigma = sigma.has_value() ? *sigma : median_heuristic_sigma(X);
  }
  const KernelMatrix K = build_kernel_matrix(X, spec);
  const DPSolution sol = dp_segment(K, a.k);
  std::printf("boundaries:");
  for (int b : sol.boundaries) std::printf(" %d", b);
  std::printf("\ncost: %.6g\n", sol.optimal_cost);
  if (!a.output.empty()) {
    std::ofstream out(a.output);
    if (!out) throw InputError("cannot write " + a.output);
    out << "{\"k\": " << a.k << ", \"boundaries\": [";
    for (std::size_t i = 0; i < sol.boundaries.size(); ++i) {
      out << (i ? ", " : "") << sol.boundaries[i];
    }
    out << "], \"cost\": " << sol.optimal_cost << "}\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sigmoid-regularized kernel segmentation of sequential data"};
  app.require_subcommand(1);

  SegmentArgs seg;
  CLI::App* s = app.add_subcommand("segment", "Segment a sequence (kcsr, skcsr, or mkcsr)");
  s->add_option("--input", seg.inputs, "Input CSV (repeat for mkcsr)")->required();
  s->add_option("--k", seg.k, "Number of segments")->required();
  s->add_option("--method", seg.method, "kcsr | skcsr | mkcsr");
  s->add_option("--alpha", seg.alpha, "Sigmoid steepness");
  s->add_option("--lambda", seg.lambda, "Balance weight (omit for auto)");
  s->add_option("--kernel", seg.kernel, "rbf | linear");
  s->add_option("--sigma", seg.sigma, "RBF bandwidth or 'auto'");
  s->add_option("--batch", seg.batch, "Minibatch size (skcsr/mkcsr)");
  s->add_option("--iters", seg.iters, "SGD iterations (0: ceil(50n/b))");
  s->add_option("--eta0", seg.eta0, "Initial learning rate");
  s->add_option("--rho", seg.rho, "Learning-rate decay");
  s->add_option("--momentum", seg.momentum, "Momentum");
  s->add_option("--seed", seg.seed, "RNG seed (skcsr/mkcsr)");
  s->add_option("--epsilon", seg.epsilon, "GD convergence tolerance");
  s->add_option("--max-iters", seg.max_iters, "GD iteration cap");
  s->add_option("--output", seg.output, "Result JSON path");
  s->add_option("--label-col", seg.label_col, "Label column to strip (name or index)");
  s->add_flag("--header", seg.header, "Input CSV has a header row");
  s->add_option("--delimiter", seg.delimiter, "CSV delimiter");
  s->add_option("--trace-out", seg.trace_out, "Prefix for .trace.csv/.tau.csv plot data");

  SynthArgs syn;
  CLI::App* y = app.add_subcommand("synth", "Generate the circles sequence");
  y->add_option("--out", syn.out, "Output CSV path")->required();
  y->add_option("--counts", syn.counts, "Samples per circle (default: random in [500,1500])")->delimiter(',');
  y->add_option("--radii", syn.radii, "Circle radii (default 1,2,3,4)")->delimiter(',');
  y->add_option("--noise", syn.noise, "Radial noise standard deviation");
  y->add_option("--seed", syn.seed, "RNG seed");

  EvalArgs ev;
  CLI::App* e = app.add_subcommand("eval", "Score a result JSON against ground truth");
  e->add_option("--pred", ev.pred, "Result JSON")->required();
  e->add_option("--truth", ev.truth, "CSV with truth labels")->required();
  e->add_option("--label-col", ev.label_col, "Label column (default: last)");
  e->add_flag("--header", ev.header, "Truth CSV has a header row");
  e->add_option("--delimiter", ev.delimiter, "CSV delimiter");

  OracleArgs orc;
  CLI::App* o = app.add_subcommand("oracle", "Exact DP segmentation (desk scale)");
  o->add_option("--input", orc.input, "Input CSV")->required();
  o->add_option("--k", orc.k, "Number of segments")->required();
  o->add_option("--kernel", orc.kernel, "rbf | linear");
  o->add_option("--sigma", orc.sigma, "RBF bandwidth or 'auto'");
  o->add_option("--label-col", orc.label_col, "Label column to strip");
  o->add_flag("--header", orc.header, "Input CSV has a header row");
  o->add_option("--delimiter", orc.delimiter, "CSV delimiter");
  o->add_option("--output", orc.output, "Write boundaries/cost JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int rc = app.exit(ex);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (s->parsed()) return cmd_segment(seg);
    if (y->parsed()) return cmd_synth(syn);
    if (e->parsed()) return cmd_eval(ev);
    if (o->parsed()) return cmd_oracle(orc);
  } catch (const kcsr::InputError& ex) {
    std::fprintf(stderr, "input error: %s\n", ex.what());
    return 1;
  } catch (const kcsr::ResourceError& ex) {
    std::fprintf(stderr, "resource refusal: %s\n", ex.what());
    return 3;
  } catch (const kcsr::NumericalError& ex) {
    std::fprintf(stderr, "numerical error: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 1;
}
