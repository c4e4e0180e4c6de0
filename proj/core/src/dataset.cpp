#include "evoter/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "evoter/errors.hpp"
#include "evoter/rng.hpp"
#include "evoter/rules.hpp"

namespace evoter {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw CsvParseError("unterminated quote", row, fields.size() + 1);
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  if (s.empty()) throw CsvParseError("empty cell", row, col);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw CsvParseError("'" + s + "' is not a number", row, col);
  return v;
}

}  // namespace

LoadedCsv load_csv(const std::string& path, const FeatureSchema& schema,
                   const std::optional<std::string>& label_column, bool require_labels,
                   const std::vector<std::string>& label_domain) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw HeaderMismatch("file is empty, header required");
  const auto header = split_csv_line(line, 1);

  std::vector<std::ptrdiff_t> feature_to_column(schema.width(), -1);
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (auto idx = schema.index_of(name)) {
      if (feature_to_column[*idx] != -1)
        throw HeaderMismatch("duplicate column '" + name + "'");
      feature_to_column[*idx] = static_cast<std::ptrdiff_t>(c);
    } else if (label_column && name == *label_column) {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else if (!label_column && label_col == -1) {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else {
      throw HeaderMismatch("unexpected column '" + name + "'");
    }
  }
  for (std::size_t i = 0; i < schema.width(); ++i)
    if (feature_to_column[i] == -1)
      throw HeaderMismatch("feature '" + schema.feature(i).name + "' not in header");
  if (label_column && label_col == -1)
    throw HeaderMismatch("label column '" + *label_column + "' not in header");
  if (require_labels && label_col == -1)
    throw MissingLabel("this run needs labels but the CSV has no label column");

  LoadedCsv out;
  out.table.schema = schema;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, row_no);
    if (fields.size() != header.size())
      throw CsvParseError("expected " + std::to_string(header.size()) + " fields, found " +
                              std::to_string(fields.size()),
                          row_no, fields.size());
    std::vector<double> row(schema.width());
    for (std::size_t i = 0; i < schema.width(); ++i) {
      const std::size_t c = static_cast<std::size_t>(feature_to_column[i]);
      const double v = parse_cell(fields[c], row_no, c + 1);
      const auto& spec = schema.feature(i);
      if (spec.kind == FeatureKind::Binary) {
        if (v != 0.0 && v != 1.0)
          throw CsvParseError("binary feature '" + spec.name + "' must be 0 or 1", row_no, c + 1);
      } else if (v < spec.min || v > spec.max) {
        ++out.report.out_of_range;
        ++out.report.per_feature[spec.name];
      }
      row[i] = v;
    }
    out.table.rows.push_back(std::move(row));
    if (label_col != -1) {
      std::string label = trim(fields[static_cast<std::size_t>(label_col)]);
      if (!label_domain.empty() &&
          std::find(label_domain.begin(), label_domain.end(), label) == label_domain.end())
        throw CsvParseError("label '" + label + "' outside the declared class set", row_no,
                            static_cast<std::size_t>(label_col) + 1);
      out.table.labels.push_back(std::move(label));
    }
  }
  return out;
}

void write_csv(const Table& table, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  for (std::size_t i = 0; i < table.schema.width(); ++i) {
    if (i) out << ',';
    out << table.schema.feature(i).name;
  }
  if (table.has_labels()) out << ',' << label_column;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t i = 0; i < table.rows[r].size(); ++i) {
      if (i) out << ',';
      out << format_double(table.rows[r][i]);
    }
    if (table.has_labels()) out << ',' << table.labels[r];
    out << '\n';
  }
}

// ---- windowed aggregate features ----

const char* to_string(Stat s) {
  switch (s) {
    case Stat::Mean: return "Mean";
    case Stat::Std: return "Std";
    case Stat::Skew: return "Skew";
    case Stat::Kurtosis: return "Kurtosis";
  }
  return "?";
}

Stat stat_from_string(const std::string& s) {
  if (s == "Mean") return Stat::Mean;
  if (s == "Std") return Stat::Std;
  if (s == "Skew") return Stat::Skew;
  if (s == "Kurtosis") return Stat::Kurtosis;
  throw Error("unknown statistic '" + s + "'");
}

namespace {

struct Moments {
  double mean = 0.0, stddev = 0.0, skew = 0.0, kurtosis = 0.0;
};

Moments window_moments(const double* x, int n) {
  Moments m;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += x[i];
  m.mean = sum / n;
  if (n < 2) return m;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x[i] - m.mean;
    const double d2 = d * d;
    ss += d2;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m.stddev = std::sqrt(ss / (n - 1));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 1e-12) {
    m.skew = m3 / std::pow(m2, 1.5);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

double pick_stat(const Moments& m, Stat s) {
  switch (s) {
    case Stat::Mean: return m.mean;
    case Stat::Std: return m.stddev;
    case Stat::Skew: return m.skew;
    case Stat::Kurtosis: return m.kurtosis;
  }
  return 0.0;
}

void check_series(const std::vector<double>& series, const WindowSpec& spec) {
  if (spec.window_len < 1) throw InvalidParams("window_len must be >= 1");
  if (spec.max_lag < 0) throw InvalidParams("max_lag must be >= 0");
  if (spec.alpha < 1 || spec.beta < 1) throw InvalidParams("alpha and beta must be >= 1");
  const std::size_t needed = static_cast<std::size_t>(spec.max_lag + 1) * spec.window_len +
                             spec.alpha + spec.beta;
  if (series.size() < needed) throw SeriesTooShort(needed, series.size());
}

/// Bucket indices usable as rows: lags available and label window in range.
std::pair<int, int> usable_buckets(const std::vector<double>& series, const WindowSpec& spec) {
  const int total = static_cast<int>(series.size()) / spec.window_len;
  int first = spec.max_lag;
  int last = total - 1;
  while (last >= first) {
    const std::size_t frame = static_cast<std::size_t>(last + 1) * spec.window_len - 1;
    if (frame + spec.alpha + spec.beta < series.size()) break;
    --last;
  }
  return {first, last};
}

}  // namespace

FeatureSchema window_schema(const WindowSpec& spec) {
  std::vector<FeatureSpec> feats;
  for (Stat s : spec.stats) {
    const auto range = spec.ranges.at(s);
    for (int lag = 0; lag <= spec.max_lag; ++lag) {
      FeatureSpec f;
      f.name = std::string(to_string(s)) + "[" + std::to_string(lag) + "]";
      f.min = range.first;
      f.max = range.second;
      feats.push_back(std::move(f));
    }
  }
  return FeatureSchema(std::move(feats), spec.actions, 0);
}

Table window_features(const std::vector<double>& series, const WindowSpec& spec) {
  check_series(series, spec);
  Table t;
  t.schema = window_schema(spec);
  const auto [first, last] = usable_buckets(series, spec);
  if (last < first) throw SeriesTooShort(series.size() + 1, series.size());

  std::vector<Moments> bucket_moments(static_cast<std::size_t>(last) + 1);
  for (int k = 0; k <= last; ++k)
    bucket_moments[k] =
        window_moments(series.data() + static_cast<std::size_t>(k) * spec.window_len,
                       spec.window_len);

  for (int k = first; k <= last; ++k) {
    std::vector<double> row;
    row.reserve(t.schema.width());
    for (Stat s : spec.stats)
      for (int lag = 0; lag <= spec.max_lag; ++lag)
        row.push_back(pick_stat(bucket_moments[k - lag], s));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> label_map(const std::vector<double>& series, const WindowSpec& spec) {
  check_series(series, spec);
  const auto [first, last] = usable_buckets(series, spec);
  std::vector<std::string> labels;
  for (int k = first; k <= last; ++k) {
    const std::size_t frame = static_cast<std::size_t>(k + 1) * spec.window_len - 1;
    double sum = 0.0;
    for (int i = 0; i <= spec.beta; ++i) sum += series[frame + spec.alpha + i];
    const double m = sum / (spec.beta + 1);
    labels.push_back(m <= 55.0 ? "Low" : (m <= 85.0 ? "Normal" : "High"));
  }
  return labels;
}

Table windowed_dataset(const std::vector<double>& series, const WindowSpec& spec) {
  Table t = window_features(series, spec);
  t.labels = label_map(series, spec);
  return t;
}

// ---- scoring ----

double score(const std::vector<std::string>& predictions, const std::vector<std::string>& labels,
             const ScoreSpec& spec) {
  if (predictions.size() != labels.size())
    throw LengthMismatch(predictions.size(), labels.size());
  if (predictions.empty()) throw EmptyInput("score needs at least one prediction");

  if (spec.kind == ScoreKind::Accuracy) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (predictions[i] == labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
  }

  double cost = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto row = spec.class_weights.find(labels[i]);
    if (row == spec.class_weights.end())
      throw Error("no cost row declared for class '" + labels[i] + "'");
    double row_max = 0.0;
    for (const auto& [cls, w] : row->second) row_max = std::max(row_max, w);
    worst += row_max;
    if (predictions[i] != labels[i]) {
      auto cell = row->second.find(predictions[i]);
      cost += cell == row->second.end() ? row_max : cell->second;
    }
  }
  if (worst <= 0.0) throw Error("cost matrix has no positive entry");
  return 1.0 - cost / worst;
}

// ---- splitting ----

std::array<Table, 3> split(const Table& table, const std::array<double, 3>& fractions,
                           std::uint64_t seed) {
  double sum = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw BadFractions("negative fraction");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw BadFractions("fractions must sum to 1");
  if (table.rows.empty()) throw EmptyInput("cannot split an empty table");

  // group rows by class (single group when unlabeled)
  std::map<std::string, std::vector<std::size_t>> groups;
  if (table.has_labels()) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) groups[table.labels[i]].push_back(i);
  } else {
    auto& all = groups[""];
    all.resize(table.rows.size());
    std::iota(all.begin(), all.end(), 0);
  }

  std::array<Table, 3> parts;
  for (auto& p : parts) p.schema = table.schema;

  RandomSource rng(seed);
  for (auto& [cls, indices] : groups) {
    for (std::size_t i = indices.size(); i > 1; --i)
      std::swap(indices[i - 1], indices[rng.below(i)]);
    const std::size_t n = indices.size();
    std::array<std::size_t, 3> counts{};
    std::size_t assigned = 0;
    for (int p = 0; p < 2; ++p) {
      counts[p] = static_cast<std::size_t>(
          std::llround(fractions[p] * static_cast<double>(n)));
      counts[p] = std::min(counts[p], n - assigned);
      assigned += counts[p];
    }
    counts[2] = n - assigned;
    std::size_t cursor = 0;
    for (int p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < counts[p]; ++i, ++cursor) {
        parts[p].rows.push_back(table.rows[indices[cursor]]);
        if (table.has_labels()) parts[p].labels.push_back(cls);
      }
    }
  }
  return parts;
}

// ---- synthetic data ----

std::vector<double> synthetic_bp_series(const SyntheticBpParams& params) {
  RandomSource rng(params.seed);
  std::vector<double> series;
  series.reserve(params.length);
  double level = params.base_mmHg;
  double episode = 0.0;  // current hypotension depression
  int episode_left = 0;
  for (std::size_t t = 0; t < params.length; ++t) {
    level += rng.gauss() * params.drift_sd;
    level = params.base_mmHg + (level - params.base_mmHg) * 0.995;
    if (episode_left > 0) {
      --episode_left;
      if (episode_left == 0) episode = 0.0;
    } else if (rng.chance(params.episode_rate)) {
      episode = params.episode_depth * (0.7 + 0.6 * rng.uniform());
      episode_left = static_cast<int>(rng.between(120, 600));
    }
    double x = level - episode + rng.gauss() * params.noise_sd;
    series.push_back(std::clamp(x, 20.0, 200.0));
  }
  return series;
}

FeatureSchema heart_failure_schema() {
  std::vector<FeatureSpec> f{
      {"age", 40.0, 95.0, FeatureKind::Continuous},
      {"anaemia", 0.0, 1.0, FeatureKind::Binary},
      {"creatinine.phosphokinase", 20.0, 8000.0, FeatureKind::Continuous},
      {"diabetes", 0.0, 1.0, FeatureKind::Binary},
      {"ejection.fraction", 14.0, 80.0, FeatureKind::Continuous},
      {"high.blood.pressure", 0.0, 1.0, FeatureKind::Binary},
      {"platelets", 25000.0, 850000.0, FeatureKind::Continuous},
      {"serum.creatinine", 0.5, 9.5, FeatureKind::Continuous},
      {"serum.sodium", 113.0, 148.0, FeatureKind::Continuous},
      {"sex", 0.0, 1.0, FeatureKind::Binary},
      {"smoking", 0.0, 1.0, FeatureKind::Binary},
      {"time", 4.0, 285.0, FeatureKind::Continuous},
  };
  return FeatureSchema(std::move(f), {"ejection.fraction", "serum.creatinine"}, 0);
}

Table make_heart_failure_table(std::uint64_t seed) {
  const std::size_t n = 299;
  Table t;
  t.schema = heart_failure_schema();
  RandomSource rng(seed);

  std::vector<double> risk(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double age = std::clamp(61.0 + rng.gauss() * 8.0, 40.0, 95.0);
    const double anaemia = rng.chance(0.43) ? 1.0 : 0.0;
    const double cpk = std::clamp(std::exp(5.6 + rng.gauss() * 0.5), 20.0, 8000.0);
    const double diabetes = rng.chance(0.42) ? 1.0 : 0.0;
    // two overlapping risk groups: weak hearts (low ejection fraction) and
    // failing kidneys (high creatinine), mostly disjoint so the right
    // intervention differs per patient
    const bool cardiac = rng.chance(0.45);
    const bool renal = rng.chance(0.35);
    const double ef = std::clamp(cardiac ? 23.0 + rng.gauss() * 4.0 : 47.0 + rng.gauss() * 8.0,
                                 14.0, 80.0);
    const double sc = std::clamp(renal ? std::exp(1.2 + rng.gauss() * 0.3)
                                       : std::exp(0.0 + rng.gauss() * 0.2),
                                 0.5, 9.5);
    const double hbp = rng.chance(0.35) ? 1.0 : 0.0;
    const double platelets = std::clamp(263000.0 + rng.gauss() * 55000.0, 25000.0, 850000.0);
    const double sodium = std::clamp(136.6 + rng.gauss() * 3.0, 113.0, 148.0);
    const double sex = rng.chance(0.65) ? 1.0 : 0.0;
    const double smoking = rng.chance(0.32) ? 1.0 : 0.0;
    const double time = std::clamp(130.0 + rng.gauss() * 45.0, 4.0, 285.0);
    t.rows.push_back({age, anaemia, cpk, diabetes, ef, hbp, platelets, sc, sodium, sex,
                      smoking, time});
    risk[i] = 3.2 * std::max(0.0, 34.0 - ef) / 8.0 + 3.2 * std::max(0.0, sc - 1.7) +
              0.25 * (age - 60.0) / 8.0 + 0.2 * anaemia + 0.15 * rng.gauss();
  }

  // exactly 96 deaths, matching the public dataset's class balance
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return risk[a] > risk[b]; });
  t.labels.assign(n, "0");
  for (std::size_t i = 0; i < 96; ++i) t.labels[order[i]] = "1";
  return t;
}

}  // namespace evoter
