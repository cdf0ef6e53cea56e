#include "t3f/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "t3f/error.hpp"
#include "t3f/text.hpp"

namespace t3f {

std::string_view to_string(FeatureMode mode) noexcept {
  switch (mode) {
    case FeatureMode::TemporalDegree: return "temporal_degree";
    case FeatureMode::Binary: return "binary";
    case FeatureMode::Provided: return "provided";
  }
  return "temporal_degree";
}

FeatureMode parse_feature_mode(std::string_view s) {
  for (auto m : {FeatureMode::TemporalDegree, FeatureMode::Binary, FeatureMode::Provided}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown feature_mode '" + std::string(s) + "'");
}

std::string_view to_string(TokenScaling s) noexcept {
  return s == TokenScaling::Raw ? "raw" : "log1p";
}

TokenScaling parse_token_scaling(std::string_view s) {
  if (s == "raw") return TokenScaling::Raw;
  if (s == "log1p") return TokenScaling::Log1p;
  throw Error(ErrorCode::InvalidConfig, "unknown token_scaling '" + std::string(s) + "'");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(delta > 0.0) || !(sigma > 0.0) || !(sigma < delta)) fail("need 0 < sigma < delta");
  if (dos_bins == 0) fail("dos_bins must be positive");
  if (sage_layers == 0 || hidden_dim == 0) fail("GSAGE needs positive depth and width");
  if (heads == 0 || d_model % heads != 0) fail("d_model must be a multiple of heads");
  if (!(lr >= 0.0)) fail("lr must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (folds < 2) fail("folds must be >= 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail("test_fraction must lie in (0, 1)");
  if (strict_grid) {
    if (std::find(std::begin(kHiddenGrid), std::end(kHiddenGrid), hidden_dim) ==
        std::end(kHiddenGrid)) {
      fail("hidden_dim must be one of 16, 32, 64, 128 (set strict_grid = false to override)");
    }
    if (std::find(std::begin(kLrGrid), std::end(kLrGrid), lr) == std::end(kLrGrid)) {
      fail("lr must be one of 0.01, 0.005, 0.001 (set strict_grid = false to override)");
    }
    if (std::find(std::begin(kDropoutGrid), std::end(kDropoutGrid), dropout) ==
        std::end(kDropoutGrid)) {
      fail("dropout must be one of 0.0, 0.3, 0.5 (set strict_grid = false to override)");
    }
  }
}

namespace {

double as_double(std::string_view key, std::string_view value) {
  const auto v = text::parse_double(value);
  if (!v) throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected a number");
  return *v;
}

std::size_t as_count(std::string_view key, std::string_view value) {
  const auto v = text::parse_int(value);
  if (!v || *v < 0) {
    throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected a non-negative integer");
  }
  return static_cast<std::size_t>(*v);
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected true/false");
}

}  // namespace

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  if (key == "delta") c.delta = as_double(key, value);
  else if (key == "sigma") c.sigma = as_double(key, value);
  else if (key == "dos_bins") c.dos_bins = as_count(key, value);
  else if (key == "count_multiplicity") c.count_multiplicity = as_bool(key, value);
  else if (key == "sage_layers") c.sage_layers = as_count(key, value);
  else if (key == "hidden_dim") c.hidden_dim = as_count(key, value);
  else if (key == "d_model") c.d_model = as_count(key, value);
  else if (key == "heads") c.heads = as_count(key, value);
  else if (key == "encoder_layers") c.encoder_layers = as_count(key, value);
  else if (key == "ffn_dim") c.ffn_dim = as_count(key, value);
  else if (key == "view_dim") c.view_dim = as_count(key, value);
  else if (key == "mode") c.mode = nn::parse_fusion_mode(value);
  else if (key == "lr") c.lr = as_double(key, value);
  else if (key == "dropout") c.dropout = as_double(key, value);
  else if (key == "weight_decay") c.weight_decay = as_double(key, value);
  else if (key == "epochs") c.epochs = as_count(key, value);
  else if (key == "seed") c.seed = as_count(key, value);
  else if (key == "folds") c.folds = as_count(key, value);
  else if (key == "feature_mode") c.feature_mode = parse_feature_mode(value);
  else if (key == "token_scaling") c.token_scaling = parse_token_scaling(value);
  else if (key == "strict_grid") c.strict_grid = as_bool(key, value);
  else if (key == "grid_search") c.grid_search = as_bool(key, value);
  else if (key == "test_fraction") c.test_fraction = as_double(key, value);
  else throw Error(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
}

RunConfig parse_run_config(std::istream& in, const std::string& source_name) {
  RunConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = text::trim(body.substr(0, hash));
    }
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected `key = value`");
    }
    const auto key = text::trim(body.substr(0, eq));
    const auto value = text::trim(body.substr(eq + 1));
    try {
      set_config_value(c, key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig,
                  source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config file " + path);
  return parse_run_config(in, path);
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "delta = " << text::format_double(c.delta) << '\n'
      << "sigma = " << text::format_double(c.sigma) << '\n'
      << "dos_bins = " << c.dos_bins << '\n'
      << "count_multiplicity = " << b(c.count_multiplicity) << '\n'
      << "sage_layers = " << c.sage_layers << '\n'
      << "hidden_dim = " << c.hidden_dim << '\n'
      << "d_model = " << c.d_model << '\n'
      << "heads = " << c.heads << '\n'
      << "encoder_layers = " << c.encoder_layers << '\n'
      << "ffn_dim = " << c.ffn_dim << '\n'
      << "view_dim = " << c.view_dim << '\n'
      << "mode = " << nn::to_string(c.mode) << '\n'
      << "lr = " << text::format_double(c.lr) << '\n'
      << "dropout = " << text::format_double(c.dropout) << '\n'
      << "weight_decay = " << text::format_double(c.weight_decay) << '\n'
      << "epochs = " << c.epochs << '\n'
      << "seed = " << c.seed << '\n'
      << "folds = " << c.folds << '\n'
      << "feature_mode = " << to_string(c.feature_mode) << '\n'
      << "token_scaling = " << to_string(c.token_scaling) << '\n'
      << "strict_grid = " << b(c.strict_grid) << '\n'
      << "grid_search = " << b(c.grid_search) << '\n'
      << "test_fraction = " << text::format_double(c.test_fraction) << '\n';
  return out.str();
}

}  // namespace t3f
