// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "t3f/config.hpp"
#include "t3f/descriptors.hpp"
#include "t3f/model.hpp"
#include "t3f/reports.hpp"
#include "t3f/spectral.hpp"
#include "t3f/stability.hpp"
#include "t3f/synth.hpp"
#include "t3f/text.hpp"
#include "t3f/topology.hpp"
#include "t3f/training.hpp"
#include "toy.hpp"

using namespace t3f;
using namespace t3f::nn;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs >= budget_s) {
    o.pass = false;
    o.detail += "; over time budget " + fmt(budget_s) + "s";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

// ---- 1 ----------------------------------------------------------------------

struct OpCheck {
  std::string name;
  std::function<oracle::GradCheck(Rng&, int)> run;
};

std::size_t dim(Rng& rng, std::size_t lo = 1, std::size_t hi = 5) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

Outcome gradients() {
  using oracle::check_gradients;
  using oracle::random_param;
  using oracle::weighted_sum;
  std::vector<OpCheck> ops;
  ops.push_back({"matmul", [](Rng& r, int i) {
                   auto a = random_param(dim(r), 3, r), b = random_param(3, dim(r), r);
                   return check_gradients({a, b}, [&] { return weighted_sum(matmul(a, b), i); });
                 }});
  ops.push_back({"transpose", [](Rng& r, int i) {
                   auto a = random_param(dim(r), dim(r), r);
                   return check_gradients({a}, [&] { return weighted_sum(transpose(a), i); });
                 }});
  ops.push_back({"add", [](Rng& r, int i) {
                   const auto m = dim(r), n = dim(r);
                   auto a = random_param(m, n, r), b = random_param(m, n, r), row = random_param(1, n, r);
                   auto g1 = check_gradients({a, b}, [&] { return weighted_sum(add(a, b), i); });
                   auto g2 = check_gradients({a, row}, [&] { return weighted_sum(add(a, row), i); });
                   g1.max_rel_error = std::max(g1.max_rel_error, g2.max_rel_error);
                   return g1;
                 }});
  ops.push_back({"mul", [](Rng& r, int i) {
                   const auto m = dim(r), n = dim(r);
                   auto a = random_param(m, n, r), b = random_param(m, n, r);
                   return check_gradients({a, b}, [&] { return weighted_sum(mul(a, b), i); });
                 }});
  ops.push_back({"scale", [](Rng& r, int i) {
                   auto a = random_param(dim(r), dim(r), r);
                   const double s = r.uniform(-3, 3);
                   return check_gradients({a}, [&] { return weighted_sum(scale(a, s), i); });
                 }});
  ops.push_back({"relu", [](Rng& r, int i) {
                   auto a = oracle::random_param_off_zero(dim(r), dim(r), r);
                   return check_gradients({a}, [&] { return weighted_sum(relu(a), i); });
                 }});
  ops.push_back({"softmax", [](Rng& r, int i) {
                   auto a = random_param(dim(r), dim(r, 2, 6), r, -3, 3);
                   return check_gradients({a}, [&] { return weighted_sum(softmax_rows(a), i); });
                 }});
  ops.push_back({"layer_norm", [](Rng& r, int i) {
                   const auto n = dim(r, 2, 6);
                   auto x = random_param(dim(r), n, r, -2, 2), g = random_param(1, n, r), b = random_param(1, n, r);
                   return check_gradients({x, g, b}, [&] { return weighted_sum(layer_norm(x, g, b), i); });
                 }});
  ops.push_back({"dropout", [](Rng& r, int i) {
                   auto a = random_param(dim(r), dim(r), r);
                   const auto seed = r.next_u64();
                   return check_gradients({a}, [&] {
                     Rng mask(seed);
                     return weighted_sum(dropout(a, 0.3, mask, true), i);
                   });
                 }});
  ops.push_back({"mean_pool", [](Rng& r, int i) {
                   auto a = random_param(dim(r), dim(r), r);
                   auto g0 = check_gradients({a}, [&] { return weighted_sum(mean_pool(a, 0), i); });
                   auto g1 = check_gradients({a}, [&] { return weighted_sum(mean_pool(a, 1), i); });
                   g0.max_rel_error = std::max(g0.max_rel_error, g1.max_rel_error);
                   return g0;
                 }});
  ops.push_back({"concat", [](Rng& r, int i) {
                   const auto m = dim(r);
                   auto a = random_param(m, dim(r), r), b = random_param(m, dim(r), r);
                   return check_gradients({a, b}, [&] {
                     const std::vector<Tensor> parts{a, b};
                     return weighted_sum(concat(parts, 1), i);
                   });
                 }});
  ops.push_back({"embedding_add", [](Rng& r, int i) {
                   const auto m = dim(r), n = dim(r);
                   auto a = random_param(m, n, r), t = random_param(m + 2, n, r);
                   return check_gradients({a, t}, [&] { return weighted_sum(embedding_add(a, t), i); });
                 }});
  ops.push_back({"neighbor_mean", [](Rng& r, int i) {
                   const auto m = dim(r, 2, 6);
                   auto a = random_param(m, dim(r), r);
                   std::vector<std::vector<std::uint32_t>> nb(m);
                   for (std::size_t v = 0; v < m; ++v)
                     for (std::size_t u = 0; u < m; ++u)
                       if (u != v && r.uniform() < 0.5) nb[v].push_back(static_cast<std::uint32_t>(u));
                   return check_gradients({a}, [&] { return weighted_sum(neighbor_mean(a, nb), i); });
                 }});
  ops.push_back({"cross_entropy", [](Rng& r, int) {
                   const auto m = dim(r), c = dim(r, 2, 5);
                   auto z = random_param(m, c, r, -4, 4);
                   std::vector<int> labels(m);
                   for (auto& l : labels) l = static_cast<int>(r.below(c));
                   return check_gradients({z}, [&] { return cross_entropy_with_logits(z, labels); });
                 }});
  ops.push_back({"end_to_end", [](Rng& r, int) {
                   ModelConfig c;
                   c.node_feature_dim = 3;
                   c.sage_hidden = 4;
                   c.d_model = 4;
                   c.heads = 2;
                   c.encoder_layers = 1;
                   c.ffn_dim = 6;
                   c.view_dim = 3;
                   const Model model(c, r.next_u64());
                   std::vector<GraphSample> batch(2);
                   for (int b = 0; b < 2; ++b) {
                     auto& s = batch[b];
                     const std::size_t n = 3 + r.below(3);
                     s.graph = StaticGraph::from_edges(n, oracle::random_graph(n, 0.6, r));
                     s.node_features = DenseMatrix(n, 3);
                     for (double& x : s.node_features.data()) x = r.uniform(0, 2);
                     const std::size_t w = 1 + r.below(3);
                     s.topo_tokens = DenseMatrix(w, 4);
                     for (double& x : s.topo_tokens.data()) x = r.uniform(0, 3);
                     s.dos_tokens = DenseMatrix(w, 4);
                     for (double& x : s.dos_tokens.data()) x = r.uniform(0, 1);
                     s.label = b;
                   }
                   return check_gradients(model.params().tensors(), [&] {
                     const int l0 = 0, l1 = 1;
                     return add(cross_entropy_with_logits(model.forward(batch[0]).logits, std::span(&l0, 1)),
                                cross_entropy_with_logits(model.forward(batch[1]).logits, std::span(&l1, 1)));
                   });
                 }});

  Rng rng(2024);
  double worst = 0.0;
  std::string worst_op;
  std::size_t entries = 0;
  for (const auto& op : ops) {
    for (int i = 0; i < 20; ++i) {
      const auto g = op.run(rng, i);
      entries += g.checked;
      if (g.max_rel_error >= worst) {
        worst = g.max_rel_error;
        worst_op = op.name;
      }
    }
  }
  return {worst < 1e-4, std::to_string(ops.size()) + " ops x 20 instances, " + std::to_string(entries) +
                            " entries, max rel err " + fmt(worst) + " (" + worst_op + ")"};
}

// ---- 2 ----------------------------------------------------------------------

Outcome topology_oracles() {
  Rng rng(99);
  const double ps[] = {0.2, 0.4, 0.6};
  int agree = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(12);
    const auto edges = oracle::random_graph(n, ps[t % 3], rng);
    const auto w = WindowGraph::from_edges(edges);
    const bool ok = betti0(w) == oracle::bfs_components(n, edges) &&
                    betti1(clique_complex(w)) == oracle::betti1_full(n, edges);
    agree += ok;
  }
  return {agree == 200, std::to_string(agree) + "/200 graphs agree"};
}

// ---- 3 ----------------------------------------------------------------------

Outcome spectral_checks() {
  Rng rng(7);
  int ok = 0, windows = 0;
  double worst_trace = 0, worst_mass = 0;
  while (windows < 100) {
    const std::size_t n = 2 + rng.below(49);
    const auto w = WindowGraph::from_edges(oracle::random_graph(n, rng.uniform(0.05, 0.5), rng));
    if (w.empty()) continue;
    ++windows;
    const auto l = normalized_laplacian(w);
    const auto ev = eigenvalues_sym(l);
    bool good = true;
    double s = 0;
    std::size_t zeros = 0;
    for (const double x : ev) {
      good &= x >= -1e-8 && x <= 2 + 1e-8;
      s += x;
      zeros += std::abs(x) < 1e-8;
    }
    worst_trace = std::max(worst_trace, std::abs(s - l.trace()));
    good &= std::abs(s - l.trace()) <= 1e-8 && zeros == betti0(w);
    double mass = 0;
    for (const double m : dos_histogram(ev).mass) mass += m;
    worst_mass = std::max(worst_mass, std::abs(mass - 1));
    good &= std::abs(mass - 1) <= 1e-12;
    ok += good;
  }
  return {ok == 100, std::to_string(ok) + "/100 windows; max |sum - trace| " + fmt(worst_trace) +
                         ", max |mass - 1| " + fmt(worst_mass)};
}

// ---- 4 ----------------------------------------------------------------------

std::size_t enumerate_windows(double t_min, double t_max, double delta, double sigma) {
  std::size_t i = 0;
  while (t_min + static_cast<double>(i) * sigma + delta < t_max) ++i;
  return i + 1;
}

Outcome window_formula() {
  Rng rng(4);
  int agree = 0;
  for (int t = 0; t < 1000; ++t) {
    const double t_min = rng.uniform(-100, 100);
    const double t_max = t_min + (t % 20 == 0 ? 0.0 : rng.uniform(0, 200));
    const double delta = rng.uniform(0.1, 30);
    const double sigma = delta * rng.uniform(0.01, 0.999);
    const auto g = TemporalGraph::from_events(2, {{0, 1, t_min}, {0, 1, t_max}});
    const WindowSpec s{delta, sigma};
    const auto n = window_count(g, s);
    agree += n == enumerate_windows(t_min, t_max, delta, sigma) && window_sequence(g, s).size() == n;
  }
  const auto g = TemporalGraph::from_events(2, {{0, 1, 0}, {0, 1, 24}});
  const auto seq = window_sequence(g, WindowSpec{6, 4});
  std::vector<double> starts;
  for (const auto& w : seq) starts.push_back(w.t_start);
  const bool anchored = window_count(g, WindowSpec{6, 4}) == 6 &&
                        starts == std::vector<double>{0, 4, 8, 12, 16, 20} &&
                        window_count(TemporalGraph::from_events(2, {{0, 1, 1}, {0, 1, 25}}), {6, 4}) == 6;
  return {agree == 1000 && anchored,
          std::to_string(agree) + "/1000 random configurations; delta=6 sigma=4 case " +
              (anchored ? "ok" : "wrong")};
}

// ---- 5 ----------------------------------------------------------------------

Outcome toy_reproduction() {
  const auto g = toy::graph();
  const auto seq = window_sequence(g, WindowSpec{2, 1});
  const std::vector<std::vector<Edge>> expected{
      {{0, 1}, {0, 2}, {0, 3}}, {{0, 1}, {0, 3}, {1, 2}}, {{0, 1}, {1, 2}, {2, 3}}};
  bool windows_ok = seq.size() >= 3;
  for (std::size_t i = 0; windows_ok && i < 3; ++i) {
    windows_ok = seq[i].t_start == 1.0 + static_cast<double>(i) && seq[i].edges == expected[i];
  }
  const auto deg = temporal_degree(g, distinct_timestamps(g));
  const std::vector<double> a(deg.row(0).begin(), deg.row(0).end());
  const std::vector<double> b(deg.row(1).begin(), deg.row(1).end());
  const bool deg_ok = a == std::vector<double>{2, 1, 1, 0, 0, 0} && b == std::vector<double>{1, 0, 1, 1, 0, 1};
  return {windows_ok && deg_ok,
          std::string("windows [1,3] [2,4] [3,5] ") + (windows_ok ? "match" : "differ") +
              "; degree rows A, B " + (deg_ok ? "match" : "differ") + "; window_count gives " +
              std::to_string(seq.size()) + " because the last event sits at t=6"};
}

// ---- 6 ----------------------------------------------------------------------

Outcome stability_topo() {
  auto spec = CampaignSpec::topo_default();
  spec.trials = 100;
  const auto r = run_campaign(spec);
  bool monotone = true;
  std::string means;
  for (std::size_t i = 0; i < r.per_eps.size(); ++i) {
    means += (i ? ", " : "") + fmt(r.per_eps[i].eps) + ": " + fmt(r.per_eps[i].mean_distance);
    if (i > 0) monotone &= r.per_eps[i].mean_distance <= r.per_eps[i - 1].mean_distance;
  }
  const bool finite = std::isfinite(r.empirical_constant);
  return {finite && monotone && r.trials.size() >= 100,
          std::to_string(r.trials.size()) + " trials; sup ratio " + fmt(r.empirical_constant) +
              "; mean distance by eps {" + means + "}"};
}

// ---- 7 ----------------------------------------------------------------------

Outcome stability_spectral() {
  auto spec = CampaignSpec::spectral_default();
  spec.trials = 100;
  const auto r = run_campaign(spec);
  int violations = 0;
  for (const auto& t : r.trials) violations += t.distance > 4.0 * t.magnitude;
  return {violations == 0 && r.trials.size() == 100,
          std::to_string(violations) + " violations of W1 <= 4 k/n in " + std::to_string(r.trials.size()) +
              " trials; max ratio " + fmt(r.empirical_constant)};
}

// ---- 8, 9 -------------------------------------------------------------------

struct LearningRun {
  std::string full_csv;
  double full = 0, topo = 0;
  std::size_t epochs = 0;
};

LearningRun learning_run() {
  const auto ds = synth_generate(SynthSpec{}, 7);
  RunConfig c;  // delta 6, sigma 4, lr 0.005, dropout 0, hidden 32, 5 folds
  c.seed = 7;
  const auto ex = extract_descriptors(ds, c);
  LearningRun out;
  out.epochs = c.epochs;
  const auto full = kfold_cv(ex, ds.num_classes, c);
  std::ostringstream csv;
  write_metrics_csv(csv, full);
  out.full_csv = csv.str();
  out.full = full.mean_accuracy;
  RunConfig t = c;
  t.mode = FusionMode::TopoOnly;
  out.topo = kfold_cv(ex, ds.num_classes, t).mean_accuracy;
  return out;
}

LearningRun first_run;

Outcome learning() {
  first_run = learning_run();
  const bool ok = first_run.full >= 0.95 && first_run.topo >= 0.90 && first_run.epochs <= 200;
  return {ok, "full " + fmt(first_run.full) + ", topo-only " + fmt(first_run.topo) + ", " +
                  std::to_string(first_run.epochs) + " epochs, 5-fold CV on 200 graphs"};
}

Outcome determinism() {
  if (first_run.full_csv.empty()) return {false, "criterion 8 produced no metrics"};
  const auto ds = synth_generate(SynthSpec{}, 7);
  RunConfig c;
  c.seed = 7;
  const auto metrics = kfold_cv(extract_descriptors(ds, c), ds.num_classes, c);
  std::ostringstream csv;
  write_metrics_csv(csv, metrics);
  const bool same = csv.str() == first_run.full_csv;
  return {same, same ? "metrics CSVs byte-identical (" + std::to_string(csv.str().size()) + " bytes)"
                     : "metrics CSVs differ"};
}

// ---- 10 ---------------------------------------------------------------------

Outcome attention() {
  struct Named {
    std::string name;
    Dataset data;
  };
  std::vector<Named> sets;
  sets.push_back({"planted", synth_generate(SynthSpec{}, 7)});
  SynthSpec three;
  three.name = "planted3";
  three.num_graphs = 60;
  three.classes = 3;
  three.cycle_density = {0, 2, 4};
  sets.push_back({"planted3", synth_generate(three, 11)});
  SynthSpec dense;
  dense.num_graphs = 40;
  dense.nodes = 15;
  dense.fire_prob = 0.9;
  dense.redraw_every = 4;
  sets.push_back({"redrawn", synth_generate(dense, 13)});

  std::vector<AttentionReport> rows;
  for (auto& s : sets) {
    RunConfig c;
    c.epochs = 20;
    const auto ex = extract_descriptors(s.data, c);
    const auto [tr, te] = stratified_split(s.data.labels(), c.test_fraction, c.seed);
    const auto trained = train(ex.samples, tr, c, s.data.num_classes, c.seed);
    rows.push_back(attention_report(s.name, evaluate(trained.model, ex.samples, te)));
  }
  std::ostringstream csv;
  write_attention_csv(csv, rows);

  // Re-read the emitted file rather than trusting the in-memory rows.
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  bool ok = line == "dataset,structural,topo,dos";
  double worst = 0;
  int count = 0;
  while (std::getline(in, line)) {
    const auto f = text::split(line, ',');
    if (f.size() != 4) {
      ok = false;
      continue;
    }
    double s = 0;
    for (int j = 1; j < 4; ++j) s += text::parse_double(f[j]).value_or(NAN);
    worst = std::max(worst, std::abs(s - 1));
    ok &= std::abs(s - 1) <= 1e-6;
    ++count;
  }
  return {ok && count == 3, std::to_string(count) + " datasets; max |sum - 1| " + fmt(worst)};
}

}  // namespace

int main() {
  criterion(1, "gradient-correctness", 120, gradients);
  criterion(2, "topology-oracles", 60, topology_oracles);
  criterion(3, "spectral-correctness", 120, spectral_checks);
  criterion(4, "window-count", 60, window_formula);
  criterion(5, "toy-reproduction", 10, toy_reproduction);
  criterion(6, "topological-stability", 300, stability_topo);
  criterion(7, "spectral-stability", 300, stability_spectral);
  criterion(8, "desk-scale-learning", 900, learning);
  criterion(9, "determinism", 900, determinism);
  criterion(10, "attention-report", 600, attention);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
