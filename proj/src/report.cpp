#include "splinepred/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "splinepred/errors.hpp"

namespace splinepred {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("write failed for " + path.string());
}

// Shortest representation that parses back to the same double.
std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

template <typename T>
std::optional<T> parse_int(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string join_norms(const std::vector<Norm>& qs, char sep) {
  std::string out;
  for (std::size_t k = 0; k < qs.size(); ++k) {
    if (k) out += sep;
    out += norm_name(qs[k]);
  }
  return out;
}

std::string join_families(const std::vector<FamilyId>& fs_, char sep) {
  std::string out;
  for (std::size_t k = 0; k < fs_.size(); ++k) {
    if (k) out += sep;
    out += family_tag(fs_[k]);
  }
  return out;
}

Norm norm_or_throw(std::string_view s) {
  auto q = parse_norm(s);
  if (!q) throw ConfigError("unknown q '" + std::string(s) + "'");
  return *q;
}

FamilyId family_or_throw(std::string_view s) {
  auto f = parse_family_tag(s);
  if (!f) throw ConfigError("unknown family '" + std::string(s) + "'");
  return *f;
}

}  // namespace

void RunConfig::validate() const {
  if (qs.empty()) throw ConfigError("q set is empty");
  if (families.empty()) throw ConfigError("family set is empty");
  if (std::set<Norm>(qs.begin(), qs.end()).size() != qs.size())
    throw ConfigError("q set has duplicates");
  if (std::set<FamilyId>(families.begin(), families.end()).size() != families.size())
    throw ConfigError("family set has duplicates");
  if (lag < 1) throw ConfigError("lag must be >= 1");
  if (!(tol_rel > 0.0) || !std::isfinite(tol_rel)) throw ConfigError("tolerance must be > 0");
  if (spline_resolution < 1) throw ConfigError("spline resolution must be >= 1");
}

SeriesData ingest_csv(const std::string& path, std::size_t min_rows) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw IngestionError(path + ": empty file", 1);
  ++lineno;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (trim(line) != "year,value")
    throw IngestionError(path + ":1: expected header 'year,value'", 1);

  SeriesData data;
  std::optional<long> prev_year;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto where = path + ":" + std::to_string(lineno) + ": ";
    const auto fields = split(t, ',');
    if (fields.size() != 2) throw IngestionError(where + "expected 2 fields", lineno);
    const auto year = parse_int<long>(trim(fields[0]));
    if (!year) throw IngestionError(where + "invalid year '" + fields[0] + "'", lineno);
    const auto value = parse_double(trim(fields[1]));
    if (!value) throw IngestionError(where + "invalid value '" + fields[1] + "'", lineno);
    if (prev_year) {
      if (*year == *prev_year)
        throw IngestionError(where + "duplicate year " + std::to_string(*year), lineno);
      if (*year != *prev_year + 1)
        throw IngestionError(where + "non-consecutive year " + std::to_string(*year) +
                                 " after " + std::to_string(*prev_year),
                             lineno);
    } else {
      data.start_year = static_cast<int>(*year);
    }
    prev_year = year;
    data.values.push_back(*value);
  }
  if (data.values.size() < std::max<std::size_t>(min_rows, 2))
    throw IngestionError(path + ": insufficient data: " + std::to_string(data.values.size()) +
                             " rows, need at least " +
                             std::to_string(std::max<std::size_t>(min_rows, 2)),
                         lineno);
  return data;
}

std::string file_digest(const std::string& path) {
  const std::string bytes = read_file(path);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double round_significant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

RunOutcome run_detailed(const RunConfig& config) {
  config.validate();
  RunOutcome out;
  out.series = ingest_csv(config.input, config.lag + 2);
  const std::size_t n = out.series.last_index();

  const EnergyCache cache(n);
  out.families.resize(config.families.size());
  for (std::size_t k = 0; k < config.families.size(); ++k)
    out.families[k] = analyze_family(build_family(config.families[k], cache), config.tol_rel);

  RunReport& rep = out.report;
  rep.input_file = fs::path(config.input).filename().string();
  rep.input_digest = file_digest(config.input);
  rep.start_year = out.series.start_year;
  rep.n = n;
  rep.lag = config.lag;
  rep.qs = config.qs;
  rep.families = config.families;
  rep.tol_rel = config.tol_rel;
  rep.full_precision = config.full_precision;

  std::set<std::string> seen;
  for (const auto& w : cache.warnings())
    if (seen.insert(w).second) rep.warnings.push_back(w);
  for (const auto& fam : out.families)
    for (const auto& w : fam.warnings)
      if (seen.insert(w).second) rep.warnings.push_back(w);

  const Tournament tournament(out.families, out.series, config.lag);
  auto fmt = [&](double x) { return config.full_precision ? x : round_significant(x); };
  for (Norm q : config.qs) {
    TournamentResult r = tournament.run(q);
    ReportRow row;
    row.q = q;
    row.family = r.family;
    row.criterion = r.criterion;
    row.cost = fmt(r.cost);
    for (std::size_t k = 0; k < 7; ++k) row.stage_costs[k] = fmt(r.winning_cascade.stages[k].cost);
    row.backtest_index = n;
    row.backtest_year = out.series.start_year + static_cast<int>(n);
    row.backtest_prediction = fmt(r.backtest_prediction);
    row.true_value = fmt(out.series.values[n]);
    row.forecast_index = n + 1;
    row.forecast_year = row.backtest_year + 1;
    row.forecast = fmt(r.forecast);
    rep.rows.push_back(row);
    out.results.push_back(std::move(r));
  }
  return out;
}

RunReport run(const RunConfig& config) { return run_detailed(config).report; }

std::string to_json(const RunReport& r) {
  ordered_json j;
  j["version"] = r.version;
  j["input"] = {{"file", r.input_file},
                {"fnv1a64", r.input_digest},
                {"start_year", r.start_year},
                {"n", r.n}};
  ordered_json qs = ordered_json::array();
  for (Norm q : r.qs) qs.push_back(std::string(norm_name(q)));
  ordered_json fams = ordered_json::array();
  for (FamilyId f : r.families) fams.push_back(std::string(family_tag(f)));
  j["config"] = {{"lag", r.lag},
                 {"q", qs},
                 {"families", fams},
                 {"tol_rel", r.tol_rel},
                 {"full_precision", r.full_precision}};

  ordered_json rows = ordered_json::array();
  for (const ReportRow& row : r.rows) {
    ordered_json crit;
    crit["kind"] = std::string(kind_name(row.criterion.kind));
    if (row.criterion.uses_u()) crit["u"] = row.criterion.u;
    if (row.criterion.uses_v()) crit["v"] = row.criterion.v;
    if (row.criterion.uses_q1()) crit["q1"] = std::string(norm_name(row.criterion.q1));
    crit["label"] = row.criterion.label();
    ordered_json e;
    e["q"] = std::string(norm_name(row.q));
    e["family"] = std::string(family_tag(row.family));
    e["criterion"] = crit;
    e["cost"] = row.cost;
    e["stage_costs"] = row.stage_costs;
    e["backtest"] = {{"index", row.backtest_index},
                     {"year", row.backtest_year},
                     {"prediction", row.backtest_prediction},
                     {"true", row.true_value}};
    e["forecast"] = {
        {"index", row.forecast_index}, {"year", row.forecast_year}, {"prediction", row.forecast}};
    rows.push_back(e);
  }
  j["results"] = rows;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  RunReport r;
  try {
    const ordered_json j = ordered_json::parse(text);
    r.version = j.at("version").get<std::string>();
    const auto& in = j.at("input");
    r.input_file = in.at("file").get<std::string>();
    r.input_digest = in.at("fnv1a64").get<std::string>();
    r.start_year = in.at("start_year").get<int>();
    r.n = in.at("n").get<std::size_t>();
    const auto& cfg = j.at("config");
    r.lag = cfg.at("lag").get<std::size_t>();
    for (const auto& q : cfg.at("q")) r.qs.push_back(norm_or_throw(q.get<std::string>()));
    for (const auto& f : cfg.at("families"))
      r.families.push_back(family_or_throw(f.get<std::string>()));
    r.tol_rel = cfg.at("tol_rel").get<double>();
    r.full_precision = cfg.at("full_precision").get<bool>();
    for (const auto& e : j.at("results")) {
      ReportRow row;
      row.q = norm_or_throw(e.at("q").get<std::string>());
      row.family = family_or_throw(e.at("family").get<std::string>());
      const auto& c = e.at("criterion");
      const auto kind = parse_kind(c.at("kind").get<std::string>());
      if (!kind) throw ConfigError("unknown criterion kind in report");
      row.criterion.kind = *kind;
      if (c.contains("u")) row.criterion.u = c.at("u").get<std::size_t>();
      if (c.contains("v")) row.criterion.v = c.at("v").get<std::size_t>();
      if (c.contains("q1")) row.criterion.q1 = norm_or_throw(c.at("q1").get<std::string>());
      row.cost = e.at("cost").get<double>();
      row.stage_costs = e.at("stage_costs").get<std::array<double, 7>>();
      const auto& b = e.at("backtest");
      row.backtest_index = b.at("index").get<std::size_t>();
      row.backtest_year = b.at("year").get<int>();
      row.backtest_prediction = b.at("prediction").get<double>();
      row.true_value = b.at("true").get<double>();
      const auto& f = e.at("forecast");
      row.forecast_index = f.at("index").get<std::size_t>();
      row.forecast_year = f.at("year").get<int>();
      row.forecast = f.at("prediction").get<double>();
      r.rows.push_back(row);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed JSON report: ") + e.what());
  }
  return r;
}

namespace {

constexpr const char* kCsvHeader =
    "q,family,criterion,u,v,q1,cost,stage1,stage2,stage3,stage4,stage5,stage6,stage7,"
    "backtest_index,backtest_year,backtest_prediction,true_value,forecast_index,forecast_year,"
    "forecast";

}  // namespace

std::string to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "# version=" << r.version << "\n";
  os << "# input_file=" << r.input_file << "\n";
  os << "# input_digest=" << r.input_digest << "\n";
  os << "# start_year=" << r.start_year << "\n";
  os << "# n=" << r.n << "\n";
  os << "# lag=" << r.lag << "\n";
  os << "# q=" << join_norms(r.qs, ';') << "\n";
  os << "# families=" << join_families(r.families, ';') << "\n";
  os << "# tol_rel=" << num(r.tol_rel) << "\n";
  os << "# full_precision=" << (r.full_precision ? "true" : "false") << "\n";
  for (const auto& w : r.warnings) os << "# warning=" << w << "\n";
  os << kCsvHeader << "\n";
  for (const ReportRow& row : r.rows) {
    const auto& c = row.criterion;
    os << norm_name(row.q) << ',' << family_tag(row.family) << ',' << kind_name(c.kind) << ','
       << (c.uses_u() ? std::to_string(c.u) : "") << ','
       << (c.uses_v() ? std::to_string(c.v) : "") << ','
       << (c.uses_q1() ? std::string(norm_name(c.q1)) : "") << ',' << num(row.cost);
    for (double s : row.stage_costs) os << ',' << num(s);
    os << ',' << row.backtest_index << ',' << row.backtest_year << ','
       << num(row.backtest_prediction) << ',' << num(row.true_value) << ','
       << row.forecast_index << ',' << row.forecast_year << ',' << num(row.forecast) << "\n";
  }
  return os.str();
}

RunReport report_from_csv(const std::string& text) {
  RunReport r;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  auto need_double = [](const std::string& s) {
    auto v = parse_double(s);
    if (!v) throw ConfigError("malformed CSV report: bad number '" + s + "'");
    return *v;
  };
  auto need_size = [](const std::string& s) {
    auto v = parse_int<std::size_t>(s);
    if (!v) throw ConfigError("malformed CSV report: bad integer '" + s + "'");
    return *v;
  };
  auto need_int = [](const std::string& s) {
    auto v = parse_int<int>(s);
    if (!v) throw ConfigError("malformed CSV report: bad integer '" + s + "'");
    return *v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string val = line.substr(eq + 1);
      if (key == "version") r.version = val;
      else if (key == "input_file") r.input_file = val;
      else if (key == "input_digest") r.input_digest = val;
      else if (key == "start_year") r.start_year = need_int(val);
      else if (key == "n") r.n = need_size(val);
      else if (key == "lag") r.lag = need_size(val);
      else if (key == "q") for (const auto& q : split(val, ';')) r.qs.push_back(norm_or_throw(q));
      else if (key == "families")
        for (const auto& f : split(val, ';')) r.families.push_back(family_or_throw(f));
      else if (key == "tol_rel") r.tol_rel = need_double(val);
      else if (key == "full_precision") r.full_precision = val == "true";
      else if (key == "warning") r.warnings.push_back(val);
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw ConfigError("malformed CSV report: unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 21) throw ConfigError("malformed CSV report: expected 21 columns");
    ReportRow row;
    row.q = norm_or_throw(f[0]);
    row.family = family_or_throw(f[1]);
    const auto kind = parse_kind(f[2]);
    if (!kind) throw ConfigError("malformed CSV report: unknown criterion " + f[2]);
    row.criterion.kind = *kind;
    if (!f[3].empty()) row.criterion.u = need_size(f[3]);
    if (!f[4].empty()) row.criterion.v = need_size(f[4]);
    if (!f[5].empty()) row.criterion.q1 = norm_or_throw(f[5]);
    row.cost = need_double(f[6]);
    for (std::size_t k = 0; k < 7; ++k) row.stage_costs[k] = need_double(f[7 + k]);
    row.backtest_index = need_size(f[14]);
    row.backtest_year = need_int(f[15]);
    row.backtest_prediction = need_double(f[16]);
    row.true_value = need_double(f[17]);
    row.forecast_index = need_size(f[18]);
    row.forecast_year = need_int(f[19]);
    row.forecast = need_double(f[20]);
    r.rows.push_back(row);
  }
  return r;
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  char buf[40];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string svg_polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& title) {
  constexpr double width = 640, height = 320, pad = 20;
  double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
  for (auto [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<title>" << title << "</title>\n";
  os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
  char buf[64];
  for (auto [x, y] : pts) {
    const double px = pad + (x - x0) / (x1 - x0) * (width - 2 * pad);
    const double py = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad);
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
    os << buf;
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

}  // namespace

std::vector<std::string> emit_plot_data(const RunOutcome& outcome, const RunConfig& config) {
  std::vector<std::string> written;
  const SeriesData& s = outcome.series;
  const std::size_t n = s.last_index();

  auto weights_file = [](Norm q, const char* ext) {
    return "weights_q" + std::string(norm_name(q)) + ext;
  };

  if (config.weights_dir) {
    for (const TournamentResult& r : outcome.results) {
      std::ostringstream os;
      os << "index,year,weight\n";
      for (std::size_t i = 0; i < r.final_row.weights.size(); ++i)
        os << i << ',' << s.start_year + static_cast<int>(i) << ','
           << num(r.final_row.weights[i]) << "\n";
      const fs::path p = fs::path(*config.weights_dir) / weights_file(r.q, ".csv");
      write_file(p, os.str());
      written.push_back(p.string());
    }
  }

  if (config.basis_level) {
    const std::size_t l = *config.basis_level;
    if (l < 1 || l > n)
      throw ConfigError("basis level " + std::to_string(l) + " outside 1.." + std::to_string(n));
    for (const AnalyzedFamily& fam : outcome.families) {
      const Matrix& b = fam.at_level(l).basis;
      std::string text;
      for (std::size_t j = 0; j <= l; ++j) text += (j ? ",b" : "b") + std::to_string(j);
      text += "\n" + matrix_csv(b);
      const fs::path p = fs::path(config.basis_dir) /
                         ("basis_" + std::string(family_tag(fam.id)) + "_l" +
                          std::to_string(l) + ".csv");
      write_file(p, text);
      written.push_back(p.string());
    }
  }

  const PiecewiseCubic spline = interpolate_natural(s.values);
  const std::size_t res = config.spline_resolution;

  if (config.spline_path) {
    // Predictor splines run through the backtest predictions of s(L+1..n)
    // and the forecast of s(n+1).
    std::vector<PiecewiseCubic> predictor_splines;
    for (const TournamentResult& r : outcome.results) {
      std::vector<double> knots = r.trace.predictions;
      knots.push_back(r.forecast);
      predictor_splines.push_back(interpolate_natural(knots));
    }
    const std::size_t first = config.lag + 1;

    std::ostringstream os;
    os << "t,year,series";
    for (const TournamentResult& r : outcome.results) os << ",predictor_q" << norm_name(r.q);
    os << "\n";
    for (std::size_t k = 0; k <= (n + 1) * res; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(res);
      os << num(t) << ',' << num(s.start_year + t) << ',';
      if (t <= static_cast<double>(n)) os << num(evaluate(spline, t));
      for (const PiecewiseCubic& ps : predictor_splines) {
        os << ',';
        if (t >= static_cast<double>(first))
          os << num(evaluate(ps, t - static_cast<double>(first)));
      }
      os << "\n";
    }
    write_file(*config.spline_path, os.str());
    written.push_back(*config.spline_path);
  }

  if (config.svg_dir) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k <= n * res; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(res);
      pts.emplace_back(s.start_year + t, evaluate(spline, t));
    }
    const fs::path sp = fs::path(*config.svg_dir) / "spline.svg";
    write_file(sp, svg_polyline(pts, "natural cubic spline of the series"));
    written.push_back(sp.string());
    for (const TournamentResult& r : outcome.results) {
      pts.clear();
      for (std::size_t i = 0; i < r.final_row.weights.size(); ++i)
        pts.emplace_back(static_cast<double>(i), r.final_row.weights[i]);
      const fs::path p = fs::path(*config.svg_dir) / weights_file(r.q, ".svg");
      write_file(p, svg_polyline(pts, "final weight row, q = " + std::string(norm_name(r.q))));
      written.push_back(p.string());
    }
  }
  return written;
}

}  // namespace splinepred
