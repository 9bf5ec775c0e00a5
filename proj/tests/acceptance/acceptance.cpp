// Acceptance suite: one PASS/FAIL line per criterion.
//
// usage: frechetcp_acceptance <path-to-frechetcp-cli> <scratch-dir>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "frechetcp/inference.hpp"
#include "frechetcp/scan.hpp"
#include "frechetcp/segmentation.hpp"
#include "frechetcp/simulation.hpp"

namespace fs = std::filesystem;
using namespace frechetcp;

namespace {

// Criterion 1
constexpr std::size_t kSizeTrials = 200;
constexpr std::size_t kSizeLength = 200;
constexpr std::size_t kSizeBootstrap = 500;
constexpr double kSizeLow = 0.02;
constexpr double kSizeHigh = 0.09;
// Criterion 2
constexpr std::size_t kPowerRuns = 100;
constexpr std::size_t kPowerBootstrap = 500;
constexpr double kPowerMin = 0.9;
constexpr double kMaeMax = 0.05;
// Criterion 3
constexpr std::size_t kStepBootstrap = 1000;
// Criterion 4
constexpr std::size_t kOracleSequences = 50;
constexpr std::size_t kOracleLength = 30;
constexpr double kOracleTolerance = 1e-12;
// Criterion 5
constexpr std::size_t kBridgeReplicates = 100000;
constexpr double kCovTolerance = 0.02;
// Criterion 6
constexpr std::size_t kInvarianceSequences = 1000;
constexpr double kScaleTolerance = 1e-9;
// Criterion 7
constexpr std::size_t kGaussianDraws = 1000;
constexpr std::size_t kGaussianGrid = 1000;
constexpr double kGaussianTolerance = 2e-3;
// Criterion 8
constexpr std::size_t kSegmentationTrials = 100;
constexpr std::size_t kSegmentationBootstrap = 500;
constexpr std::size_t kSegmentationSlack = 2;
constexpr std::size_t kSegmentationRequired = 90;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt_double(double x, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << x;
  return out.str();
}

ObjectSequence scalar_sequence(const std::vector<double>& values) {
  std::vector<MetricObject> items;
  items.reserve(values.size());
  for (double v : values) items.emplace_back(EuclideanObject({v}));
  return ObjectSequence(items);
}

Outcome null_size() {
  std::size_t rejections = 0;
  for (std::size_t trial = 0; trial < kSizeTrials; ++trial) {
    RngStream rng(1001, {trial});
    std::vector<double> y(kSizeLength);
    for (auto& v : y) v = rng.normal();
    CalibrationConfig config;
    config.num_replicates = kSizeBootstrap;
    config.seed = derive_seed(2002, {trial});
    rejections += run_test(scalar_sequence(y), config).reject ? 1 : 0;
  }
  const double rate = static_cast<double>(rejections) / kSizeTrials;
  return {rate >= kSizeLow && rate <= kSizeHigh,
          "rejection rate " + fmt_double(rate) + " in [" + fmt_double(kSizeLow) + ", " +
              fmt_double(kSizeHigh) + "]"};
}

Outcome strong_alternative() {
  ScenarioSpec spec;
  spec.family = Family::wasserstein_location;
  spec.param = 1.0;
  spec.n1 = 100;
  spec.n2 = 200;
  spec.seed = 3003;
  CalibrationConfig config;
  config.num_replicates = kPowerBootstrap;
  config.seed = 4004;
  const std::vector<ScenarioSpec> specs{spec};
  const StudyResult result = run_study(specs, config, kPowerRuns);
  const double power = result.power.front();
  const double mae = result.mae.front();
  return {power >= kPowerMin && mae <= kMaeMax,
          "power " + fmt_double(power) + " >= " + fmt_double(kPowerMin) + ", MAE " +
              fmt_double(mae) + " <= " + fmt_double(kMaeMax)};
}

Outcome step_consistency() {
  std::vector<double> y(300, 5.0);
  std::fill(y.begin(), y.begin() + 100, 0.0);
  CalibrationConfig config;
  config.num_replicates = kStepBootstrap;
  config.seed = 5005;
  const ChangePointReport report = run_test(scalar_sequence(y), config);
  const double floor = 1.0 / (kStepBootstrap + 1.0);
  const bool pass =
      report.tau_hat_index == 100 && report.tau_hat == 100.0 / 300.0 && report.p_value == floor;
  return {pass, "tau_hat " + fmt_double(report.tau_hat, 17) + " (index " +
                    std::to_string(report.tau_hat_index) + "), p-value " +
                    fmt_double(report.p_value, 6) + " vs floor " + fmt_double(floor, 6)};
}

// Closed-form scalar statistics, written from the definitions.
Outcome euclidean_oracle() {
  double worst = 0.0;
  std::mt19937_64 gen(6006);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> jump(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> where(5, kOracleLength - 5);
  auto track = [&worst](double got, double want) {
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  };
  for (std::size_t s = 0; s < kOracleSequences; ++s) {
    const std::size_t n = kOracleLength;
    const std::size_t change = where(gen);
    const double shift = jump(gen);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = noise(gen) * (i < change ? 1.0 : 1.5) + (i < change ? 0 : shift);
    const ObjectSequence seq = scalar_sequence(y);
    const double c = 0.1;
    const ScanProfile profile = scan(seq, c);

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double pooled = 0.0;
    for (double v : y) pooled += (v - mean) * (v - mean);
    pooled /= n;
    double sigma = 0.0;
    for (double v : y) sigma += ((v - mean) * (v - mean) - pooled) * ((v - mean) * (v - mean) - pooled);
    sigma /= n;
    track(profile.sigma_sq, sigma);
    track(profile.pooled_var, pooled);

    double best = -1.0;
    for (const ScanPoint& p : profile.points) {
      const std::size_t k = p.k;
      double ml = 0.0, mr = 0.0;
      for (std::size_t i = 0; i < k; ++i) ml += y[i];
      for (std::size_t i = k; i < n; ++i) mr += y[i];
      ml /= k;
      mr /= (n - k);
      double vl = 0, vr = 0, vlc = 0, vrc = 0;
      for (std::size_t i = 0; i < k; ++i) {
        vl += (y[i] - ml) * (y[i] - ml);
        vlc += (y[i] - mr) * (y[i] - mr);
      }
      for (std::size_t i = k; i < n; ++i) {
        vr += (y[i] - mr) * (y[i] - mr);
        vrc += (y[i] - ml) * (y[i] - ml);
      }
      vl /= k;
      vlc /= k;
      vr /= (n - k);
      vrc /= (n - k);
      const double u = static_cast<double>(k) / n;
      const double t = u * (1 - u) / sigma *
                       ((vl - vr) * (vl - vr) + (vlc - vl + vrc - vr) * (vlc - vl + vrc - vr));
      best = std::max(best, t);

      const SegmentStats stats = segment_stats(seq, k);
      track(stats.mu_left.coords()[0], ml);
      track(stats.mu_right.coords()[0], mr);
      track(p.v_left, vl);
      track(p.v_right, vr);
      track(p.v_left_cont, vlc);
      track(p.v_right_cont, vrc);
      track(p.v_left_cont - p.v_left + p.v_right_cont - p.v_right, vlc - vl + vrc - vr);
      track(p.t_value, t);
    }
    track(profile.stat / n, best);
  }
  return {worst <= kOracleTolerance, "largest relative discrepancy " + fmt_double(worst, 3) +
                                         " <= " + fmt_double(kOracleTolerance, 3)};
}

Outcome bridge_covariance() {
  const std::vector<double> grid{0.2, 0.8};
  double sa = 0, sb = 0, sab = 0;
  for (std::size_t r = 0; r < kBridgeReplicates; ++r) {
    RngStream rng(7007, {stream_tag::bridge, r});
    const auto g = standardized_bridge_path(grid, rng);
    sa += g[0];
    sb += g[1];
    sab += g[0] * g[1];
  }
  const double n = static_cast<double>(kBridgeReplicates);
  const double cov = sab / n - (sa / n) * (sb / n);
  const double expected = std::sqrt(0.2 * 0.2 / (0.8 * 0.8));
  return {std::abs(cov - expected) <= kCovTolerance,
          "Cov(G(0.2), G(0.8)) = " + fmt_double(cov) + ", expected " + fmt_double(expected) +
              " +/- " + fmt_double(kCovTolerance)};
}

ObjectSequence random_sequence(Space space, std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> spread(0.2, 2.0);
  std::vector<MetricObject> items;
  const std::size_t change = n / 3 + gen() % (n / 3);
  const double shift = z(gen);
  for (std::size_t i = 0; i < n; ++i) {
    const double offset = i < change ? 0.0 : shift;
    switch (space) {
      case Space::wasserstein:
        items.emplace_back(gaussian_quantile_grid(z(gen) + offset, spread(gen), 20));
        break;
      case Space::frobenius: {
        std::vector<double> a(9);
        for (std::size_t r = 0; r < 3; ++r)
          for (std::size_t c = r; c < 3; ++c) a[r * 3 + c] = a[c * 3 + r] = z(gen) + offset;
        items.emplace_back(SymMatrixObject(3, a));
        break;
      }
      case Space::euclidean: {
        std::vector<double> x(4);
        for (auto& v : x) v = z(gen) + offset;
        items.emplace_back(EuclideanObject(x));
        break;
      }
    }
  }
  return ObjectSequence(items);
}

Outcome invariances() {
  std::mt19937_64 gen(8008);
  std::size_t scale_fail = 0, reversal_fail = 0, dominance_fail = 0;
  double worst_scale = 0.0;
  const Space spaces[] = {Space::wasserstein, Space::frobenius, Space::euclidean};
  for (std::size_t s = 0; s < kInvarianceSequences; ++s) {
    const Space space = spaces[s % 3];
    const std::size_t n = 20 + gen() % 21;
    const ObjectSequence seq = random_sequence(space, n, gen);
    const ScanProfile base = scan(seq, 0.1);
    const ScanProfile scaled = scan(seq.scaled(3.0), 0.1);
    const ScanProfile reversed = scan(seq.reversed(), 0.1);
    const std::size_t m = base.points.size();
    bool scale_ok = true, reversal_ok = reversed.stat == base.stat, dominance_ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      const ScanPoint& p = base.points[i];
      const double rel = std::abs(scaled.points[i].t_value - p.t_value) / std::max(p.t_value, 1e-300);
      worst_scale = std::max(worst_scale, rel);
      scale_ok = scale_ok && rel <= kScaleTolerance;
      const ScanPoint& q = reversed.points[m - 1 - i];
      reversal_ok = reversal_ok && q.t_value == p.t_value && q.k + p.k == n;
      dominance_ok = dominance_ok && p.v_left_cont >= p.v_left && p.v_right_cont >= p.v_right;
    }
    scale_fail += !scale_ok;
    reversal_fail += !reversal_ok;
    dominance_fail += !dominance_ok;
  }
  return {scale_fail == 0 && reversal_fail == 0 && dominance_fail == 0,
          std::to_string(kInvarianceSequences) + " sequences: scale failures " +
              std::to_string(scale_fail) + " (worst " + fmt_double(worst_scale, 3) +
              "), reversal failures " + std::to_string(reversal_fail) +
              ", dominance failures " + std::to_string(dominance_fail)};
}

Outcome wasserstein_gaussian() {
  std::mt19937_64 gen(9009);
  std::uniform_real_distribution<double> mean(-5.0, 5.0), sd(0.5, 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < kGaussianDraws; ++i) {
    const double m1 = mean(gen), s1 = sd(gen), m2 = mean(gen), s2 = sd(gen);
    const double grid = distance(gaussian_quantile_grid(m1, s1, kGaussianGrid),
                                 gaussian_quantile_grid(m2, s2, kGaussianGrid));
    const double exact = std::sqrt((m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2));
    worst = std::max(worst, std::abs(grid - exact));
  }
  return {worst <= kGaussianTolerance,
          "largest |d_grid - d_exact| " + fmt_double(worst, 3) + " <= " +
              fmt_double(kGaussianTolerance, 3)};
}

Outcome segmentation_recovery() {
  std::size_t recovered = 0, spurious = 0;
  for (std::size_t trial = 0; trial < kSegmentationTrials; ++trial) {
    RngStream rng(10010, {trial});
    std::vector<double> y(300);
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = (i < 100 ? 0.0 : i < 200 ? 5.0 : 10.0) + rng.normal();
    CalibrationConfig config;
    config.num_replicates = kSegmentationBootstrap;
    config.seed = derive_seed(11011, {trial});
    const SegmentationResult result = binary_segmentation(scalar_sequence(y), config);
    auto near = [&](std::size_t target) {
      return std::any_of(result.change_points.begin(), result.change_points.end(),
                         [&](const ChangePoint& cp) {
                           return cp.index + kSegmentationSlack >= target &&
                                  cp.index <= target + kSegmentationSlack;
                         });
    };
    recovered += near(100) && near(200);
    spurious += result.change_points.size() > 2 ? result.change_points.size() - 2 : 0;
  }
  return {recovered >= kSegmentationRequired,
          std::to_string(recovered) + "/" + std::to_string(kSegmentationTrials) +
              " trials recover both changes within +/-" + std::to_string(kSegmentationSlack) +
              " (need " + std::to_string(kSegmentationRequired) + "), extra change points " +
              std::to_string(spurious)};
}

int run_command(const std::string& command) {
  const int status = std::system((command + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome cli_determinism(const std::string& cli, const fs::path& work) {
  fs::remove_all(work);
  const std::string exe = "'" + cli + "'";
  std::size_t files = 0;
  std::vector<std::string> mismatches;
  for (const char* run : {"run1", "run2"}) {
    const fs::path dir = work / run;
    fs::create_directories(dir);
    const std::string d = "'" + dir.string() + "'";
    // Both runs read the inputs written by the first, so the echoed input
    // paths agree; the generated files themselves are compared as outputs.
    const std::string in = "'" + (work / "run1").string() + "'";
    const std::vector<std::string> commands{
        exe + " generate --family wasserstein_location --param 0.6 --seed 5 --shape 30 --output " +
            d + "/seq.csv",
        exe + " detect --input " + in + "/seq.csv --format quantile_csv --replicates 300 --seed 9" +
            " --out-dir " + d + "/detect",
        exe + " detect --input " + in + "/seq.csv --format quantile_csv --replicates 200 --seed 9" +
            " --segment --out-dir " + d + "/segment",
        exe + " detect --input " + in + "/seq.csv --format quantile_csv --method asymptotic" +
            " --replicates 5000 --seed 9 --out-dir " + d + "/asymptotic",
        exe + " generate --family ba_network --param 1.5 --seed 6 --n1 30 --n2 30 --output " + d +
            "/ba.json",
        exe + " detect --input " + in + "/ba.json --format matrix_json --replicates 200 --seed 2" +
            " --out-dir " + d + "/ba",
        exe + " simulate --family mvn_location --param-grid 0:1:0.5 --runs 8 --n1 20 --n2 40" +
            " --shape 5 --replicates 200 --seed 3 --out-dir " + d + "/simulate",
    };
    for (const auto& command : commands)
      if (const int code = run_command(command); code != 0)
        return {false, "command failed with exit code " + std::to_string(code) + ": " + command};
  }
  for (const auto& entry : fs::recursive_directory_iterator(work / "run1")) {
    if (!entry.is_regular_file()) continue;
    const fs::path relative = fs::relative(entry.path(), work / "run1");
    ++files;
    if (read_bytes(entry.path()) != read_bytes(work / "run2" / relative))
      mismatches.push_back(relative.string());
  }
  std::string detail = std::to_string(files) + " output files compared, " +
                       std::to_string(mismatches.size()) + " differ";
  for (const auto& m : mismatches) detail += " [" + m + "]";
  return {files > 0 && mismatches.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: frechetcp_acceptance <frechetcp-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "null size calibration", null_size},
      {2, "power at a strong alternative", strong_alternative},
      {3, "location consistency on a step sequence", step_consistency},
      {4, "scalar oracle equivalence", euclidean_oracle},
      {5, "bridge covariance", bridge_covariance},
      {6, "invariance suite", invariances},
      {7, "Wasserstein Gaussian closed form", wasserstein_gaussian},
      {8, "segmentation of three regimes", segmentation_recovery},
      {9, "CLI determinism", [&] { return cli_determinism(cli, work); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome{false, ""};
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion.id << " ("
              << criterion.name << "): " << outcome.detail << " [" << fmt_double(seconds, 3)
              << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
