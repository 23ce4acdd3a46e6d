#include "clickstat/io.hpp"

#include "clickstat/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace clickstat {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::ValidationError, path + ": " + why);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) invalid(path + key, "unknown field");
  }
}

const json& member(const json& j, const std::string& path, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) invalid(path + key, "missing field");
  return *it;
}

double number_at(const json& j, const std::string& path, const char* key) {
  const auto& v = member(j, path, key);
  if (!v.is_number()) invalid(path + key, "expected a number");
  return v.get<double>();
}

int integer_at(const json& j, const std::string& path, const char* key) {
  const auto& v = member(j, path, key);
  if (!v.is_number_integer()) invalid(path + key, "expected an integer");
  const auto n = v.get<long long>();
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) invalid(path + key, "out of range");
  return static_cast<int>(n);
}

StateSpec state_from_json(const json& j, const std::string& path, int depth) {
  if (!j.is_object()) invalid(path.empty() ? "state" : path.substr(0, path.size() - 1), "expected an object");
  if (depth > kMaxMixtureDepth) invalid(path + "components", "mixture nesting too deep");
  const auto& kind_value = member(j, path, "kind");
  if (!kind_value.is_string()) invalid(path + "kind", "expected a string");
  const auto kind = kind_value.get<std::string>();
  StateSpec spec;
  if (kind == "coherent" || kind == "thermal") {
    allow_keys(j, path, {"kind", "mean_photons"});
    const double mu = number_at(j, path, "mean_photons");
    spec = kind == "coherent" ? StateSpec::coherent(mu) : StateSpec::thermal(mu);
  } else if (kind == "fock") {
    allow_keys(j, path, {"kind", "n"});
    spec = StateSpec::fock(integer_at(j, path, "n"));
  } else if (kind == "squeezed_vacuum") {
    allow_keys(j, path, {"kind", "r"});
    spec = StateSpec::squeezed_vacuum(number_at(j, path, "r"));
  } else if (kind == "mixture") {
    allow_keys(j, path, {"kind", "components"});
    const auto& comps = member(j, path, "components");
    if (!comps.is_array()) invalid(path + "components", "expected an array");
    std::vector<MixtureComponent> components;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string here = path + "components[" + std::to_string(i) + "].";
      if (!comps[i].is_object()) invalid(here.substr(0, here.size() - 1), "expected an object");
      allow_keys(comps[i], here, {"weight", "state"});
      components.push_back({number_at(comps[i], here, "weight"),
                            state_from_json(member(comps[i], here, "state"), here + "state.", depth + 1)});
    }
    spec = StateSpec::mixture(std::move(components));
  } else if (kind == "explicit") {
    allow_keys(j, path, {"kind", "probs"});
    const auto& probs = member(j, path, "probs");
    if (!probs.is_array()) invalid(path + "probs", "expected an array");
    std::vector<double> values;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!probs[i].is_number()) invalid(path + "probs[" + std::to_string(i) + "]", "expected a number");
      values.push_back(probs[i].get<double>());
    }
    spec = StateSpec::explicit_distribution(std::move(values));
  } else {
    invalid(path + "kind", "unknown state kind '" + kind + "'");
  }
  return spec;
}

json state_to_json(const StateSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case StateKind::Coherent:
    case StateKind::Thermal: j["mean_photons"] = spec.mean_photons; break;
    case StateKind::Fock: j["n"] = spec.n; break;
    case StateKind::SqueezedVacuum: j["r"] = spec.r; break;
    case StateKind::Mixture: {
      json comps = json::array();
      for (const auto& c : spec.components) comps.push_back({{"weight", c.weight}, {"state", state_to_json(c.state)}});
      j["components"] = std::move(comps);
      break;
    }
    case StateKind::Explicit: j["probs"] = spec.probs; break;
  }
  return j;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed ") + what + ": " + e.what());
  }
}

// Structured output: rounded numbers, null for NaN.
json number_json(double value) {
  if (std::isnan(value)) return nullptr;
  return round_to_output_precision(value);
}

double json_number_or_nan(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return kNaN;
  if (!it->is_number()) throw Error(ErrorCode::ParseError, std::string(key) + ": expected a number");
  return it->get<double>();
}

std::string read_all(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool looks_structured(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text[pos] == '{';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

std::string strip(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const char* what) {
  const std::string s = strip(field);
  if (s == "nan" || s == "NaN" || s.empty()) return kNaN;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw Error(ErrorCode::ParseError, std::string("bad number in ") + what + ": '" + s + "'");
  return v;
}

template <typename Int>
Int parse_integer(const std::string& field, const char* what) {
  const std::string s = strip(field);
  Int value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::ParseError, std::string("bad integer in ") + what + ": '" + s + "'");
  return value;
}

// Non-empty, non-comment lines of a table.
std::vector<std::vector<std::string>> table_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    line = strip(line);
    if (line.empty() || line.front() == '#') continue;
    rows.push_back(split(line, ','));
  }
  return rows;
}

void expect_header(const std::vector<std::vector<std::string>>& rows, const std::vector<std::string>& header,
                   const char* what) {
  if (rows.empty() || rows.front() != header)
    throw Error(ErrorCode::ParseError, std::string("missing or unexpected header in ") + what);
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].size() != header.size())
      throw Error(ErrorCode::ParseError, std::string("wrong column count in ") + what + " row " + std::to_string(i));
}

const std::vector<std::string> kReportHeader{"q_b", "q_m_clicks", "q_m_photons", "click_mean", "click_variance"};
const std::vector<std::string> kEstimateHeader{"statistic",  "point_estimate",   "ci_low",
                                               "ci_high",    "confidence_level", "sample_size",
                                               "bootstrap_replicates", "discarded_resamples"};

Statistic parse_statistic(const std::string& name) {
  if (name == "q_b") return Statistic::QB;
  if (name == "q_m") return Statistic::QM;
  throw Error(ErrorCode::ParseError, "unknown statistic '" + name + "'");
}

}  // namespace

double round_to_output_precision(double value) {
  if (!std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return std::strtod(buf, nullptr);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

StateSpec parse_state_spec(std::string_view text) {
  const auto spec = state_from_json(parse_json(text, "state spec"), "", 0);
  spec.validate();
  return spec;
}

std::string format_state_spec(const StateSpec& spec) { return state_to_json(spec).dump(); }

std::string format_detector_config(const DetectorConfig& config) {
  return json{{"N", config.detectors}, {"eta", config.eta}, {"nu", config.nu}}.dump();
}

DetectorConfig parse_detector_config(std::string_view text) {
  const auto j = parse_json(text, "detector config");
  if (!j.is_object()) invalid("config", "expected an object");
  allow_keys(j, "", {"N", "eta", "nu"});
  DetectorConfig config{integer_at(j, "", "N"), number_at(j, "", "eta"), number_at(j, "", "nu")};
  config.validate();
  return config;
}

void write_sample_file(std::ostream& out, const ClickSampleSet& samples) {
  out << "# N=" << samples.detectors << '\n'
      << "# seed=" << samples.seed << '\n'
      << "# trials=" << samples.trials << '\n'
      << "# state=" << format_state_spec(samples.state_echo) << '\n'
      << "# config=" << format_detector_config(samples.config_echo) << '\n'
      << "clicks\n";
  std::string buffer;
  buffer.reserve(samples.clicks.size() * 3);
  char digits[16];
  for (int c : samples.clicks) {
    const auto [end, ec] = std::to_chars(digits, digits + sizeof digits, c);
    buffer.append(digits, end);
    buffer.push_back('\n');
  }
  out << buffer;
}

ClickSampleSet read_sample_file(std::istream& in) {
  ClickSampleSet samples;
  samples.detectors = 0;
  bool have_trials = false;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.empty()) continue;
      if (line.front() == '#') {
        const std::string body = strip(line.substr(1));
        const auto eq = body.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = strip(body.substr(0, eq));
        const std::string value = strip(body.substr(eq + 1));
        if (key == "N") {
          samples.detectors = parse_integer<int>(value, "sample preamble N");
        } else if (key == "seed") {
          samples.seed = parse_integer<std::uint64_t>(value, "sample preamble seed");
        } else if (key == "trials") {
          samples.trials = parse_integer<std::uint64_t>(value, "sample preamble trials");
          have_trials = true;
        } else if (key == "state") {
          samples.state_echo = parse_state_spec(value);
        } else if (key == "config") {
          samples.config_echo = parse_detector_config(value);
        }
        continue;
      }
      if (strip(line) != "clicks")
        throw Error(ErrorCode::ParseError, "sample file line " + std::to_string(line_no) + ": expected 'clicks' header");
      have_header = true;
      continue;
    }
    if (strip(line).empty()) continue;
    samples.clicks.push_back(parse_integer<int>(line, "sample record"));
  }
  if (have_trials && samples.trials != samples.clicks.size())
    throw Error(ErrorCode::ParseError, "sample file declares " + std::to_string(samples.trials) + " trials but holds " +
                                           std::to_string(samples.clicks.size()) + " records");
  samples.trials = samples.clicks.size();
  return samples;
}

void write_click_distribution(std::ostream& out, const ClickDistribution& dist, OutputFormat format) {
  if (format == OutputFormat::Structured) {
    json probs = json::array();
    for (Eigen::Index k = 0; k < dist.probs.size(); ++k) probs.push_back(number_json(dist.probs(k)));
    out << json{{"N", dist.detectors()}, {"probs", std::move(probs)}}.dump() << '\n';
    return;
  }
  out << "k,c_k\n";
  for (Eigen::Index k = 0; k < dist.probs.size(); ++k) out << k << ',' << format_number(dist.probs(k)) << '\n';
}

ClickDistribution read_click_distribution(std::istream& in) {
  const std::string text = read_all(in);
  std::vector<double> probs;
  if (looks_structured(text)) {
    const auto j = parse_json(text, "click distribution");
    const auto it = j.find("probs");
    if (it == j.end() || !it->is_array()) throw Error(ErrorCode::ParseError, "click distribution lacks probs");
    for (const auto& p : *it) probs.push_back(p.get<double>());
    if (j.contains("N") && j["N"].get<int>() + 1 != static_cast<int>(probs.size()))
      throw Error(ErrorCode::ParseError, "click distribution length does not match N");
  } else {
    const auto rows = table_rows(text);
    expect_header(rows, {"k", "c_k"}, "click distribution");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (parse_integer<int>(rows[i][0], "click distribution") != static_cast<int>(i - 1))
        throw Error(ErrorCode::ParseError, "click distribution rows out of order");
      probs.push_back(parse_double(rows[i][1], "click distribution"));
    }
  }
  if (probs.empty()) throw Error(ErrorCode::ParseError, "click distribution is empty");
  return ClickDistribution{Eigen::Map<Vector<double>>(probs.data(), static_cast<Eigen::Index>(probs.size()))};
}

void write_nonclassicality_report(std::ostream& out, const NonclassicalityReport& report, OutputFormat format) {
  const double q_m_photons = report.q_m_photons.value_or(kNaN);
  if (format == OutputFormat::Structured) {
    out << json{{"q_b", number_json(report.q_b)},
                {"q_m_clicks", number_json(report.q_m_clicks)},
                {"q_m_photons", number_json(q_m_photons)},
                {"click_mean", number_json(report.click_mean)},
                {"click_variance", number_json(report.click_variance)}}
               .dump()
        << '\n';
    return;
  }
  out << "q_b,q_m_clicks,q_m_photons,click_mean,click_variance\n"
      << format_number(report.q_b) << ',' << format_number(report.q_m_clicks) << ',' << format_number(q_m_photons)
      << ',' << format_number(report.click_mean) << ',' << format_number(report.click_variance) << '\n';
}

NonclassicalityReport read_nonclassicality_report(std::istream& in) {
  const std::string text = read_all(in);
  double values[5];
  if (looks_structured(text)) {
    const auto j = parse_json(text, "report");
    for (int i = 0; i < 5; ++i) values[i] = json_number_or_nan(j, kReportHeader[i].c_str());
  } else {
    const auto rows = table_rows(text);
    expect_header(rows, kReportHeader, "report");
    if (rows.size() != 2) throw Error(ErrorCode::ParseError, "report table must hold exactly one row");
    for (int i = 0; i < 5; ++i) values[i] = parse_double(rows[1][i], "report");
  }
  NonclassicalityReport report;
  report.q_b = values[0];
  report.q_m_clicks = values[1];
  if (!std::isnan(values[2])) report.q_m_photons = values[2];
  report.click_mean = values[3];
  report.click_variance = values[4];
  return report;
}

void write_estimates(std::ostream& out, const std::vector<EstimateReport>& reports, OutputFormat format) {
  if (format == OutputFormat::Structured) {
    json list = json::array();
    for (const auto& r : reports) {
      list.push_back({{"statistic", to_string(r.statistic)},
                      {"point_estimate", number_json(r.point_estimate)},
                      {"ci_low", number_json(r.ci_low)},
                      {"ci_high", number_json(r.ci_high)},
                      {"confidence_level", number_json(r.confidence_level)},
                      {"sample_size", r.sample_size},
                      {"bootstrap_replicates", r.bootstrap_replicates},
                      {"discarded_resamples", r.discarded_resamples}});
    }
    out << json{{"estimates", std::move(list)}}.dump() << '\n';
    return;
  }
  out << "statistic,point_estimate,ci_low,ci_high,confidence_level,sample_size,bootstrap_replicates,"
         "discarded_resamples\n";
  for (const auto& r : reports) {
    out << to_string(r.statistic) << ',' << format_number(r.point_estimate) << ',' << format_number(r.ci_low) << ','
        << format_number(r.ci_high) << ',' << format_number(r.confidence_level) << ',' << r.sample_size << ','
        << r.bootstrap_replicates << ',' << r.discarded_resamples << '\n';
  }
}

std::vector<EstimateReport> read_estimates(std::istream& in) {
  const std::string text = read_all(in);
  std::vector<EstimateReport> reports;
  if (looks_structured(text)) {
    const auto j = parse_json(text, "estimate report");
    const auto it = j.find("estimates");
    if (it == j.end() || !it->is_array()) throw Error(ErrorCode::ParseError, "estimate report lacks estimates");
    for (const auto& e : *it) {
      EstimateReport r;
      r.statistic = parse_statistic(e.at("statistic").get<std::string>());
      r.point_estimate = json_number_or_nan(e, "point_estimate");
      r.ci_low = json_number_or_nan(e, "ci_low");
      r.ci_high = json_number_or_nan(e, "ci_high");
      r.confidence_level = json_number_or_nan(e, "confidence_level");
      r.sample_size = e.at("sample_size").get<std::uint64_t>();
      r.bootstrap_replicates = e.at("bootstrap_replicates").get<std::uint64_t>();
      r.discarded_resamples = e.at("discarded_resamples").get<std::uint64_t>();
      reports.push_back(r);
    }
    return reports;
  }
  const auto rows = table_rows(text);
  expect_header(rows, kEstimateHeader, "estimate report");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    EstimateReport r;
    r.statistic = parse_statistic(strip(f[0]));
    r.point_estimate = parse_double(f[1], "estimate report");
    r.ci_low = parse_double(f[2], "estimate report");
    r.ci_high = parse_double(f[3], "estimate report");
    r.confidence_level = parse_double(f[4], "estimate report");
    r.sample_size = parse_integer<std::uint64_t>(f[5], "estimate report");
    r.bootstrap_replicates = parse_integer<std::uint64_t>(f[6], "estimate report");
    r.discarded_resamples = parse_integer<std::uint64_t>(f[7], "estimate report");
    reports.push_back(r);
  }
  return reports;
}

void write_sweep(std::ostream& out, const SweepTable& table, OutputFormat format) {
  auto field = [](const SweepRow& row, double NonclassicalityReport::*member) {
    return row.report ? (*row.report).*member : kNaN;
  };
  if (format == OutputFormat::Structured) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      rows.push_back({{"value", number_json(row.axis_value)},
                      {"q_b", number_json(field(row, &NonclassicalityReport::q_b))},
                      {"q_m_clicks", number_json(field(row, &NonclassicalityReport::q_m_clicks))},
                      {"click_mean", number_json(field(row, &NonclassicalityReport::click_mean))},
                      {"click_variance", number_json(field(row, &NonclassicalityReport::click_variance))}});
    }
    out << json{{"axis", to_string(table.axis)}, {"rows", std::move(rows)}}.dump() << '\n';
    return;
  }
  out << to_string(table.axis) << ",q_b,q_m_clicks,click_mean,click_variance\n";
  for (const auto& row : table.rows) {
    out << format_number(row.axis_value) << ',' << format_number(field(row, &NonclassicalityReport::q_b)) << ','
        << format_number(field(row, &NonclassicalityReport::q_m_clicks)) << ','
        << format_number(field(row, &NonclassicalityReport::click_mean)) << ','
        << format_number(field(row, &NonclassicalityReport::click_variance)) << '\n';
  }
}

SweepTable read_sweep(std::istream& in) {
  const std::string text = read_all(in);
  SweepTable table{};
  auto make_row = [](double value, double qb, double qm, double mean, double var) {
    SweepRow row{value, std::nullopt};
    if (!(std::isnan(qb) && std::isnan(qm) && std::isnan(mean) && std::isnan(var))) {
      NonclassicalityReport r;
      r.q_b = qb;
      r.q_m_clicks = qm;
      r.click_mean = mean;
      r.click_variance = var;
      row.report = r;
    }
    return row;
  };
  if (looks_structured(text)) {
    const auto j = parse_json(text, "sweep");
    const auto axis = parse_sweep_axis(j.at("axis").get<std::string>());
    if (!axis) throw Error(ErrorCode::ParseError, "unknown sweep axis");
    table.axis = *axis;
    for (const auto& r : j.at("rows")) {
      table.rows.push_back(make_row(json_number_or_nan(r, "value"), json_number_or_nan(r, "q_b"),
                                    json_number_or_nan(r, "q_m_clicks"), json_number_or_nan(r, "click_mean"),
                                    json_number_or_nan(r, "click_variance")));
    }
    return table;
  }
  const auto rows = table_rows(text);
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::ParseError, "sweep table is empty");
  const auto axis = parse_sweep_axis(strip(rows.front().front()));
  if (!axis) throw Error(ErrorCode::ParseError, "unknown sweep axis '" + rows.front().front() + "'");
  table.axis = *axis;
  expect_header(rows, {rows.front().front(), "q_b", "q_m_clicks", "click_mean", "click_variance"}, "sweep");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    table.rows.push_back(make_row(parse_double(f[0], "sweep"), parse_double(f[1], "sweep"), parse_double(f[2], "sweep"),
                                  parse_double(f[3], "sweep"), parse_double(f[4], "sweep")));
  }
  return table;
}

}  // namespace clickstat
