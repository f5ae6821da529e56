#include "ghostspec/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ghostspec::io {

namespace fs = std::filesystem;

namespace {

void write_text_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw io_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw io_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

struct TextFile {
  std::string name;
  std::vector<std::string> lines;
};

TextFile read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  TextFile file;
  file.name = path.string();
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    file.lines.push_back(line);
  }
  return file;
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

/// Parse the `# <kind> v<N>` schema line and following `# key: value`
/// metadata. Returns the index of the first data line.
std::size_t parse_header(const TextFile& file, std::string_view kind, Metadata& metadata) {
  if (file.lines.empty()) throw parse_error(file.name, 1, "empty file");
  const std::string expected = "# " + std::string(kind) + " v";
  const std::string& first = file.lines[0];
  if (first.rfind(expected, 0) != 0)
    throw parse_error(file.name, 1,
                      "expected schema line '" + expected + std::to_string(kSchemaVersion) +
                          "', got '" + first + "'");
  int version = 0;
  const std::string vs = first.substr(expected.size());
  auto [p, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), version);
  if (ec != std::errc() || version != kSchemaVersion)
    throw parse_error(file.name, 1, "unsupported " + std::string(kind) + " schema version '" + vs +
                                        "' (this build reads v" +
                                        std::to_string(kSchemaVersion) + ")");
  std::size_t i = 1;
  for (; i < file.lines.size(); ++i) {
    const std::string& line = file.lines[i];
    if (line.empty() || line[0] != '#') break;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;  // bare comment
    std::string key = trim(line.substr(1, colon - 1));
    std::string value = trim(line.substr(colon + 1));
    if (!key.empty()) metadata[key] = value;
  }
  return i;
}

double parse_real(const TextFile& file, std::size_t line_no, const std::string& token,
                  const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw parse_error(file.name, line_no + 1,
                      std::string("invalid ") + what + " '" + token + "'");
  }
}

std::int64_t parse_count(const TextFile& file, std::size_t line_no, const std::string& token) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || p != token.data() + token.size())
    throw parse_error(file.name, line_no + 1,
                      "count must be a plain non-negative integer, got '" + token + "'");
  if (v < 0)
    throw parse_error(file.name, line_no + 1, "negative count '" + token + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

std::string metadata_block(const Metadata& metadata) {
  std::string out;
  for (const auto& [key, value] : metadata) out += "# " + key + ": " + value + "\n";
  return out;
}

std::string schema_line(std::string_view kind) {
  return "# " + std::string(kind) + " v" + std::to_string(kSchemaVersion) + "\n";
}

}  // namespace

BinnedSpectrum load_spectrum(const fs::path& path, Metadata* metadata) {
  const TextFile file = read_lines(path);
  Metadata meta;
  std::size_t start = parse_header(file, kSpectrumKind, meta);
  std::vector<double> wavelengths;
  std::vector<std::int64_t> counts;
  for (std::size_t i = start; i < file.lines.size(); ++i) {
    const std::string& line = file.lines[i];
    if (is_blank(line)) continue;
    if (line[0] == '#')
      throw parse_error(file.name, i + 1, "metadata lines must precede data rows");
    const auto tokens = split_ws(line);
    if (tokens.size() != 2)
      throw parse_error(file.name, i + 1, "expected 'wavelength count', got " +
                                              std::to_string(tokens.size()) + " fields");
    const double w = parse_real(file, i, tokens[0], "wavelength");
    if (!wavelengths.empty() && w <= wavelengths.back())
      throw parse_error(file.name, i + 1, "wavelengths must be strictly increasing");
    wavelengths.push_back(w);
    counts.push_back(parse_count(file, i, tokens[1]));
  }
  if (wavelengths.size() < 2)
    throw parse_error(file.name, file.lines.size(), "spectrum needs at least 2 bins");
  if (metadata) *metadata = std::move(meta);
  return BinnedSpectrum(WavelengthGrid(std::move(wavelengths)), std::move(counts));
}

void save_spectrum(const BinnedSpectrum& spectrum, const fs::path& path,
                   const Metadata& metadata) {
  std::string out = schema_line(kSpectrumKind);
  out += metadata_block(metadata);
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    out += format_real(spectrum.grid()[i]) + " " + std::to_string(spectrum.counts()[i]) + "\n";
  write_text_atomic(path, out);
}

LoadedImage load_count_image(const fs::path& path) {
  const TextFile file = read_lines(path);
  Metadata meta;
  std::size_t start = parse_header(file, kImageKind, meta);
  if (!meta.count("wavelength-start") || !meta.count("wavelength-step"))
    throw parse_error(file.name, 1,
                      "missing calibration block (wavelength-start / wavelength-step)");
  const double w0 = parse_real(file, 0, meta.at("wavelength-start"), "wavelength-start");
  const double dw = parse_real(file, 0, meta.at("wavelength-step"), "wavelength-step");
  if (!(dw > 0)) throw parse_error(file.name, 1, "calibration increment must be positive");

  std::vector<std::int64_t> data;
  std::size_t cols = 0, rows = 0;
  for (std::size_t i = start; i < file.lines.size(); ++i) {
    const std::string& line = file.lines[i];
    if (is_blank(line)) continue;
    const auto tokens = split_ws(line);
    if (cols == 0)
      cols = tokens.size();
    else if (tokens.size() != cols)
      throw parse_error(file.name, i + 1, "ragged row: expected " + std::to_string(cols) +
                                              " columns, got " + std::to_string(tokens.size()));
    for (const auto& token : tokens) data.push_back(parse_count(file, i, token));
    ++rows;
  }
  if (rows == 0 || cols < 2)
    throw parse_error(file.name, file.lines.size(), "image needs rows and at least 2 columns");
  return LoadedImage{CountImage(rows, cols, std::move(data)),
                     WavelengthGrid::uniform(w0, dw, cols)};
}

void save_count_image(const CountImage& image, double wavelength_start_nm,
                      double wavelength_step_nm, const fs::path& path, const Metadata& metadata) {
  Metadata meta = metadata;
  meta["wavelength-start"] = format_real(wavelength_start_nm);
  meta["wavelength-step"] = format_real(wavelength_step_nm);
  std::string out = schema_line(kImageKind);
  out += metadata_block(meta);
  for (std::size_t r = 0; r < image.rows(); ++r) {
    for (std::size_t c = 0; c < image.cols(); ++c) {
      if (c) out += ' ';
      out += std::to_string(image.at(r, c));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

namespace {

std::string rate_column(double level) { return "rejection_rate@" + format_real(level); }

}  // namespace

void write_sweep(const SweepResult& result, const fs::path& path) {
  Metadata meta;
  meta["axis1"] = result.axis1_name;
  meta["scenario"] = result.scenario_label;
  meta["grid"] = result.grid_descriptor;
  meta["trials"] = std::to_string(result.n_trials);
  meta["seed"] = std::to_string(result.master_seed);
  meta["rng"] = result.rng_name;
  {
    std::string levels;
    for (double s : result.significances) {
      if (!levels.empty()) levels += ' ';
      levels += format_real(s);
    }
    meta["significances"] = levels;
  }

  std::string out = schema_line(kSweepKind);
  out += metadata_block(meta);
  out += "axis1,n_t";
  for (double s : result.significances) out += "," + rate_column(s);
  out += ",p_mean,p_q25,p_q75,p_min,p_max,mean_detected\n";
  for (const SweepCell& cell : result.cells) {
    out += format_real(cell.axis1) + "," + std::to_string(cell.n_t);
    for (double rate : cell.rejection_rates) out += "," + format_real(rate);
    out += "," + format_real(cell.p_stats.mean) + "," + format_real(cell.p_stats.q25) + "," +
           format_real(cell.p_stats.q75) + "," + format_real(cell.p_stats.min) + "," +
           format_real(cell.p_stats.max) + "," + format_real(cell.mean_realized_total) + "\n";
  }
  write_text_atomic(path, out);
}

SweepResult read_sweep(const fs::path& path) {
  const TextFile file = read_lines(path);
  Metadata meta;
  std::size_t start = parse_header(file, kSweepKind, meta);

  SweepResult result;
  if (auto it = meta.find("axis1"); it != meta.end()) result.axis1_name = it->second;
  if (auto it = meta.find("scenario"); it != meta.end()) result.scenario_label = it->second;
  if (auto it = meta.find("grid"); it != meta.end()) result.grid_descriptor = it->second;
  if (auto it = meta.find("rng"); it != meta.end()) result.rng_name = it->second;
  if (auto it = meta.find("trials"); it != meta.end())
    result.n_trials = static_cast<int>(parse_count(file, 0, it->second));
  if (auto it = meta.find("seed"); it != meta.end()) {
    std::uint64_t seed = 0;
    auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), seed);
    if (ec != std::errc()) throw parse_error(file.name, 1, "invalid seed '" + it->second + "'");
    result.master_seed = seed;
  }
  if (auto it = meta.find("significances"); it != meta.end())
    for (const auto& token : split_ws(it->second))
      result.significances.push_back(parse_real(file, 0, token, "significance"));

  if (start >= file.lines.size())
    throw parse_error(file.name, file.lines.size(), "missing column header row");
  const auto header = split_csv(file.lines[start]);
  const std::size_t expected_cols = 2 + result.significances.size() + 6;
  if (header.size() != expected_cols || header[0] != "axis1" || header[1] != "n_t")
    throw parse_error(file.name, start + 1, "unexpected sweep column header");

  for (std::size_t i = start + 1; i < file.lines.size(); ++i) {
    if (is_blank(file.lines[i])) continue;
    const auto fields = split_csv(file.lines[i]);
    if (fields.size() != expected_cols)
      throw parse_error(file.name, i + 1, "expected " + std::to_string(expected_cols) +
                                              " fields, got " + std::to_string(fields.size()));
    SweepCell cell;
    std::size_t f = 0;
    cell.axis1 = parse_real(file, i, fields[f++], "axis1 value");
    cell.n_t = parse_count(file, i, fields[f++]);
    for (std::size_t s = 0; s < result.significances.size(); ++s)
      cell.rejection_rates.push_back(parse_real(file, i, fields[f++], "rejection rate"));
    cell.p_stats.mean = parse_real(file, i, fields[f++], "p_mean");
    cell.p_stats.q25 = parse_real(file, i, fields[f++], "p_q25");
    cell.p_stats.q75 = parse_real(file, i, fields[f++], "p_q75");
    cell.p_stats.min = parse_real(file, i, fields[f++], "p_min");
    cell.p_stats.max = parse_real(file, i, fields[f++], "p_max");
    cell.mean_realized_total = parse_real(file, i, fields[f++], "mean_detected");
    if (result.axis1_values.empty() || cell.axis1 != result.axis1_values.back())
      if (std::find(result.axis1_values.begin(), result.axis1_values.end(), cell.axis1) ==
          result.axis1_values.end())
        result.axis1_values.push_back(cell.axis1);
    if (std::find(result.n_t_values.begin(), result.n_t_values.end(), cell.n_t) ==
        result.n_t_values.end())
      result.n_t_values.push_back(cell.n_t);
    result.cells.push_back(std::move(cell));
  }
  if (result.cells.empty())
    throw parse_error(file.name, file.lines.size(), "sweep table has no data rows");
  if (result.cells.size() != result.axis1_values.size() * result.n_t_values.size())
    throw parse_error(file.name, file.lines.size(),
                      "sweep table does not form a full axis1 x n_t grid");
  return result;
}

void write_batch(const TrialBatch& batch, std::uint64_t seed, const fs::path& path) {
  Metadata meta;
  meta["scenario"] = batch.descriptor;
  meta["trials"] = std::to_string(batch.n_trials);
  meta["seed"] = std::to_string(seed);
  meta["rng"] = std::string(kRngName);

  std::string out = schema_line(kBatchKind);
  out += metadata_block(meta);
  out += "trial,p_value,statistic,detected\n";
  for (int t = 0; t < batch.n_trials; ++t)
    out += std::to_string(t) + "," + format_real(batch.p_values[t]) + "," +
           format_real(batch.statistics[t]) + "," + std::to_string(batch.realized_totals[t]) +
           "\n";
  write_text_atomic(path, out);
}

TrialBatch read_batch(const fs::path& path, Metadata* metadata) {
  const TextFile file = read_lines(path);
  Metadata meta;
  std::size_t start = parse_header(file, kBatchKind, meta);
  if (start >= file.lines.size() || split_csv(file.lines[start]).size() != 4)
    throw parse_error(file.name, start + 1, "missing batch column header row");
  TrialBatch batch;
  if (auto it = meta.find("scenario"); it != meta.end()) batch.descriptor = it->second;
  for (std::size_t i = start + 1; i < file.lines.size(); ++i) {
    if (is_blank(file.lines[i])) continue;
    const auto fields = split_csv(file.lines[i]);
    if (fields.size() != 4)
      throw parse_error(file.name, i + 1, "expected 4 fields per batch row");
    batch.p_values.push_back(parse_real(file, i, fields[1], "p_value"));
    batch.statistics.push_back(parse_real(file, i, fields[2], "statistic"));
    batch.realized_totals.push_back(parse_count(file, i, fields[3]));
  }
  batch.n_trials = static_cast<int>(batch.p_values.size());
  if (batch.n_trials == 0)
    throw parse_error(file.name, file.lines.size(), "batch table has no data rows");
  if (metadata) *metadata = std::move(meta);
  return batch;
}

void write_batch_archive(const TrialBatch& batch, std::uint64_t seed, const fs::path& path) {
  nlohmann::json doc;
  doc["schema"] = std::string(kBatchKind) + "-archive/" + std::to_string(kSchemaVersion);
  doc["scenario"] = batch.descriptor;
  doc["seed"] = seed;
  doc["rng"] = std::string(kRngName);
  doc["trials"] = batch.n_trials;
  doc["p_values"] = batch.p_values;
  doc["statistics"] = batch.statistics;
  doc["detected"] = batch.realized_totals;
  write_text_atomic(path, doc.dump(2) + "\n");
}

void load_transmittance_table(const fs::path& path, std::vector<double>& wavelengths_nm,
                              std::vector<double>& transmittance) {
  const TextFile file = read_lines(path);
  Metadata meta;
  std::size_t start = parse_header(file, kTableKind, meta);
  wavelengths_nm.clear();
  transmittance.clear();
  for (std::size_t i = start; i < file.lines.size(); ++i) {
    if (is_blank(file.lines[i])) continue;
    const auto tokens = split_ws(file.lines[i]);
    if (tokens.size() != 2)
      throw parse_error(file.name, i + 1, "expected 'wavelength transmittance'");
    const double w = parse_real(file, i, tokens[0], "wavelength");
    const double t = parse_real(file, i, tokens[1], "transmittance");
    if (!wavelengths_nm.empty() && w <= wavelengths_nm.back())
      throw parse_error(file.name, i + 1, "wavelengths must be strictly increasing");
    if (!(t >= 0.0 && t <= 1.0))
      throw parse_error(file.name, i + 1, "transmittance must lie in [0,1]");
    wavelengths_nm.push_back(w);
    transmittance.push_back(t);
  }
  if (wavelengths_nm.size() < 2)
    throw parse_error(file.name, file.lines.size(), "table needs at least 2 samples");
}

void save_transmittance_table(const std::vector<double>& wavelengths_nm,
                              const std::vector<double>& transmittance, const fs::path& path) {
  if (wavelengths_nm.size() != transmittance.size())
    throw invalid_parameter_error("table arrays must have equal length");
  std::string out = schema_line(kTableKind);
  for (std::size_t i = 0; i < wavelengths_nm.size(); ++i)
    out += format_real(wavelengths_nm[i]) + " " + format_real(transmittance[i]) + "\n";
  write_text_atomic(path, out);
}

ScenarioConfig load_scenario_config(const fs::path& path) {
  const TextFile file = read_lines(path);
  if (file.lines.empty() ||
      file.lines[0].rfind("# " + std::string(kScenarioKind) + " v", 0) != 0)
    throw parse_error(file.name, 1, "expected '# " + std::string(kScenarioKind) + " v" +
                                        std::to_string(kSchemaVersion) + "' schema line");
  ScenarioConfig config;
  bool have_family = false, have_nt = false;
  for (std::size_t i = 1; i < file.lines.size(); ++i) {
    const std::string& line = file.lines[i];
    if (is_blank(line) || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw parse_error(file.name, i + 1, "expected 'key: value'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key == "family") {
      config.family = value;
      have_family = true;
    } else if (key == "alpha") {
      config.alpha = parse_real(file, i, value, "alpha");
    } else if (key == "sigma") {
      config.sigma = parse_real(file, i, value, "sigma");
    } else if (key == "nt") {
      config.n_t = parse_count(file, i, value);
      have_nt = true;
    } else if (key == "nr") {
      config.n_r = parse_count(file, i, value);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || p != value.data() + value.size())
        throw parse_error(file.name, i + 1, "invalid seed '" + value + "'");
      config.seed = seed;
    } else if (key == "table") {
      config.table_path = value;
    } else {
      throw parse_error(file.name, i + 1, "unknown scenario key '" + key + "'");
    }
  }
  if (!have_family) throw parse_error(file.name, file.lines.size(), "missing 'family' key");
  if (!have_nt) throw parse_error(file.name, file.lines.size(), "missing 'nt' key");
  return config;
}

void save_scenario_config(const ScenarioConfig& config, const fs::path& path) {
  std::string out = schema_line(kScenarioKind);
  out += "family: " + config.family + "\n";
  if (config.family == "broad") out += "alpha: " + format_real(config.alpha) + "\n";
  if (config.family == "dip") out += "sigma: " + format_real(config.sigma) + "\n";
  if (config.family == "tabulated") out += "table: " + config.table_path + "\n";
  out += "nt: " + std::to_string(config.n_t) + "\n";
  if (config.n_r) out += "nr: " + std::to_string(*config.n_r) + "\n";
  out += "seed: " + std::to_string(config.seed) + "\n";
  write_text_atomic(path, out);
}

Scenario make_scenario(const ScenarioConfig& config, const fs::path& base_dir) {
  Scenario scenario = [&]() {
    if (config.family == "broad")
      return scenario_broad_absorber(config.alpha, config.n_t, config.seed);
    if (config.family == "dip")
      return scenario_narrow_dip(config.sigma, config.n_t, config.seed);
    if (config.family == "supergaussian")
      return scenario_supergaussian_filter(config.n_t, config.seed);
    if (config.family == "tabulated") {
      if (config.table_path.empty())
        throw invalid_parameter_error("tabulated scenario needs a 'table' path");
      fs::path table = config.table_path;
      if (table.is_relative() && !base_dir.empty()) table = base_dir / table;
      std::vector<double> wavelengths, values;
      load_transmittance_table(table, wavelengths, values);
      return scenario_tabulated(std::move(wavelengths), std::move(values), config.n_t,
                                config.seed);
    }
    throw invalid_parameter_error("unknown scenario family '" + config.family +
                                  "' (expected broad | dip | supergaussian | tabulated)");
  }();
  if (config.n_r) {
    if (*config.n_r < 1) throw invalid_parameter_error("nr must be >= 1");
    scenario.n_reference_resources = *config.n_r;
  }
  return scenario;
}

}  // namespace ghostspec::io
