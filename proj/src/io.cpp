#include "liegeo/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liegeo/error.hpp"

namespace liegeo {

using json = nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::parse_error, what); }

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "malformed JSON at byte " << e.byte << ": " << e.what();
    parse_fail(os.str());
  }
}

template <class T>
T field(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    parse_fail(std::string(where) + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    parse_fail(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

double parse_real(const std::string& token, const std::string& where) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end != nullptr && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || end == nullptr || *end != '\0') {
    parse_fail(where + ": cannot parse '" + token + "' as a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join_reals(const AlgebraVector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_real(v(i));
  }
  return out;
}

std::vector<std::string> column_names(const Trajectory& traj) {
  std::vector<std::string> cols{"t"};
  const auto& s0 = traj.samples.front();
  for (Eigen::Index i = 0; i < s0.g.rows(); ++i) {
    for (Eigen::Index j = 0; j < s0.g.cols(); ++j) {
      cols.push_back("g" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  }
  for (Eigen::Index i = 0; i < s0.psi.size(); ++i) cols.push_back("psi" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < s0.u.size(); ++i) cols.push_back("u" + std::to_string(i + 1));
  return cols;
}

std::vector<double> row_values(const TrajectorySample& s) {
  std::vector<double> row{s.t};
  for (Eigen::Index i = 0; i < s.g.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.g.cols(); ++j) row.push_back(s.g(i, j));
  }
  for (Eigen::Index i = 0; i < s.psi.size(); ++i) row.push_back(s.psi(i));
  for (Eigen::Index i = 0; i < s.u.size(); ++i) row.push_back(s.u(i));
  return row;
}

struct Layout {
  Eigen::Index d = 0, n = 0, r = 0;
};

Layout layout_from_columns(const std::vector<std::string>& cols) {
  Layout l;
  Eigen::Index g_count = 0;
  if (cols.empty() || cols.front() != "t") parse_fail("trajectory header must start with 't'");
  for (std::size_t k = 1; k < cols.size(); ++k) {
    const auto& c = cols[k];
    if (c.rfind("psi", 0) == 0) {
      ++l.n;
    } else if (c.rfind("g", 0) == 0) {
      ++g_count;
    } else if (c.rfind("u", 0) == 0) {
      ++l.r;
    } else {
      parse_fail("unknown trajectory column '" + c + "'");
    }
  }
  l.d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(g_count))));
  if (l.d * l.d != g_count || l.d == 0 || l.n == 0 || l.r == 0) {
    parse_fail("trajectory header does not describe g, psi and u blocks");
  }
  return l;
}

TrajectorySample sample_from_row(const std::vector<double>& row, const Layout& l) {
  if (static_cast<Eigen::Index>(row.size()) != 1 + l.d * l.d + l.n + l.r) {
    parse_fail("trajectory row has the wrong number of fields");
  }
  TrajectorySample s;
  std::size_t k = 0;
  s.t = row[k++];
  s.g.resize(l.d, l.d);
  for (Eigen::Index i = 0; i < l.d; ++i) {
    for (Eigen::Index j = 0; j < l.d; ++j) s.g(i, j) = row[k++];
  }
  s.psi.resize(l.n);
  for (Eigen::Index i = 0; i < l.n; ++i) s.psi(i) = row[k++];
  s.u.resize(l.r);
  for (Eigen::Index i = 0; i < l.r; ++i) s.u(i) = row[k++];
  return s;
}

AlgebraVector to_vector(const std::vector<double>& v) {
  AlgebraVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

void set_meta(Trajectory& traj, const std::string& key, const std::string& value) {
  const std::string where = "metadata '" + key + "'";
  if (key == "model") {
    traj.model = value;
  } else if (key == "method") {
    try {
      traj.method = method_from_string(value);
    } catch (const Error& e) {
      parse_fail(e.what());
    }
  } else if (key == "psi0") {
    traj.psi0 = to_vector(parse_real_list(value));
  } else if (key == "step") {
    traj.step = parse_real(value, where);
  } else if (key == "horizon") {
    traj.horizon = parse_real(value, where);
  } else if (key == "speed") {
    traj.speed = parse_real(value, where);
  } else if (key == "max_speed_deviation") {
    traj.diagnostics.max_speed_deviation = parse_real(value, where);
  } else if (key == "max_hamiltonian_deviation") {
    traj.diagnostics.max_hamiltonian_deviation = parse_real(value, where);
  }
}

Trajectory read_csv(std::istream& is) {
  Trajectory traj;
  std::string line;
  std::vector<std::string> cols;
  Layout layout;
  long long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      set_meta(traj, trim(line.substr(1, colon - 1)), trim(line.substr(colon + 1)));
      continue;
    }
    if (cols.empty()) {
      for (const auto& c : split(line, ',')) cols.push_back(trim(c));
      layout = layout_from_columns(cols);
      continue;
    }
    std::vector<double> row;
    for (const auto& tok : split(line, ',')) {
      row.push_back(parse_real(trim(tok), "line " + std::to_string(line_no)));
    }
    traj.samples.push_back(sample_from_row(row, layout));
  }
  if (cols.empty()) parse_fail("trajectory file has no header row");
  return traj;
}

Trajectory read_json(std::istream& is) {
  std::stringstream buf;
  buf << is.rdbuf();
  const json doc = parse_json(buf.str());
  const char* where = "trajectory";
  Trajectory traj;
  traj.model = field<std::string>(doc, "model", where);
  set_meta(traj, "method", field<std::string>(doc, "method", where));
  traj.psi0 = to_vector(field<std::vector<double>>(doc, "psi0", where));
  traj.step = field<double>(doc, "step", where);
  traj.horizon = field<double>(doc, "horizon", where);
  traj.speed = field<double>(doc, "speed", where);
  const json diag = field<json>(doc, "diagnostics", where);
  traj.diagnostics.max_speed_deviation = field<double>(diag, "max_speed_deviation", where);
  traj.diagnostics.max_hamiltonian_deviation =
      field<double>(diag, "max_hamiltonian_deviation", where);
  const auto layout = layout_from_columns(field<std::vector<std::string>>(doc, "columns", where));
  for (const auto& row : field<std::vector<std::vector<double>>>(doc, "rows", where)) {
    traj.samples.push_back(sample_from_row(row, layout));
  }
  return traj;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) parse_fail("empty number list");
  for (const auto& tok : split(text, ',')) out.push_back(parse_real(trim(tok), "number list"));
  return out;
}

FileFormat format_from_string(const std::string& s) {
  if (s == "csv") return FileFormat::csv;
  if (s == "json") return FileFormat::json;
  parse_fail("unknown format '" + s + "' (csv or json)");
}

ModelDescription parse_model_description(const std::string& text) {
  const json doc = parse_json(text);
  const char* where = "model file";
  ModelDescription desc;
  desc.name = field<std::string>(doc, "name", where);
  desc.n = field<int>(doc, "n", where);
  desc.r = field<int>(doc, "r", where);
  if (desc.n < 1 || desc.r < 1 || desc.r > desc.n) parse_fail("model file: need 1 <= r <= n");

  std::vector<StructureEntry> entries;
  const json sc = field<json>(doc, "structure_constants", where);
  if (!sc.is_array()) parse_fail("model file: structure_constants must be a list");
  for (const auto& e : sc) {
    const char* ewhere = "structure constant entry";
    StructureEntry entry{field<int>(e, "i", ewhere), field<int>(e, "j", ewhere),
                         field<int>(e, "k", ewhere), field<double>(e, "value", ewhere)};
    for (int idx : {entry.i, entry.j, entry.k}) {
      if (idx < 1 || idx > desc.n) parse_fail("structure constant index outside 1..n");
    }
    entries.push_back(entry);
  }
  desc.structure = StructureConstants::from_entries(desc.n, entries);

  const json rep = field<json>(doc, "representation", where);
  const int d = field<int>(rep, "d", "representation");
  if (d < 1) parse_fail("representation: d must be positive");
  const auto mats = field<std::vector<std::vector<double>>>(rep, "matrices", "representation");
  if (static_cast<int>(mats.size()) != desc.n) {
    parse_fail("representation: expected n = " + std::to_string(desc.n) + " matrices");
  }
  for (const auto& flat : mats) {
    if (static_cast<int>(flat.size()) != d * d) {
      parse_fail("representation: each matrix needs d*d row-major entries");
    }
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = flat[static_cast<std::size_t>(i * d + j)];
    }
    desc.matrices.push_back(std::move(m));
  }
  if (doc.contains("params")) {
    desc.params = field<std::map<std::string, double>>(doc, "params", where);
  }
  return desc;
}

ModelDescription read_model_description(const std::string& path) {
  return parse_model_description(read_text_file(path));
}

LieModel to_model(const ModelDescription& desc) {
  return LieModel(desc.name, desc.structure, Representation(desc.matrices), desc.r, desc.params);
}

void write_trajectory(std::ostream& os, const Trajectory& traj, FileFormat format,
                      const TrajectoryMeta& meta) {
  if (traj.samples.empty()) throw Error(Errc::invalid_argument, "cannot write an empty trajectory");
  const auto cols = column_names(traj);
  if (format == FileFormat::json) {
    json doc;
    doc["model"] = traj.model;
    doc["method"] = to_string(traj.method);
    doc["psi0"] = std::vector<double>(traj.psi0.data(), traj.psi0.data() + traj.psi0.size());
    doc["step"] = traj.step;
    doc["horizon"] = traj.horizon;
    doc["speed"] = traj.speed;
    doc["decimation"] = meta.decimation;
    if (meta.stamp) doc["stamp"] = *meta.stamp;
    doc["diagnostics"] = {{"max_speed_deviation", traj.diagnostics.max_speed_deviation},
                          {"max_hamiltonian_deviation", traj.diagnostics.max_hamiltonian_deviation}};
    doc["columns"] = cols;
    json rows = json::array();
    for (const auto& s : traj.samples) rows.push_back(row_values(s));
    doc["rows"] = std::move(rows);
    os << doc.dump() << '\n';
    return;
  }
  os << "# model: " << traj.model << '\n'
     << "# method: " << to_string(traj.method) << '\n'
     << "# psi0: " << join_reals(traj.psi0) << '\n'
     << "# step: " << format_real(traj.step) << '\n'
     << "# horizon: " << format_real(traj.horizon) << '\n'
     << "# speed: " << format_real(traj.speed) << '\n'
     << "# decimation: " << meta.decimation << '\n'
     << "# max_speed_deviation: " << format_real(traj.diagnostics.max_speed_deviation) << '\n'
     << "# max_hamiltonian_deviation: "
     << format_real(traj.diagnostics.max_hamiltonian_deviation) << '\n';
  if (meta.stamp) os << "# stamp: " << *meta.stamp << '\n';
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (const auto& s : traj.samples) {
    const auto row = row_values(s);
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_real(row[k]);
    os << '\n';
  }
}

Trajectory read_trajectory(std::istream& is, FileFormat format) {
  return format == FileFormat::json ? read_json(is) : read_csv(is);
}

void write_pendulum_csv(std::ostream& os, const PendulumReduction& red) {
  os << "t,angle,rate\n";
  for (const auto& s : red.samples) {
    os << format_real(s.t) << ',' << format_real(s.angle) << ',' << format_real(s.rate) << '\n';
  }
}

std::string schedule_to_json(const ControlSchedule& sched) {
  json doc = json::array();
  for (const auto& seg : sched.segments) {
    doc.push_back({{"duration", seg.duration}, {"index", seg.index}, {"sign", seg.sign}});
  }
  return doc.dump();
}

ControlSchedule schedule_from_json(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_array()) parse_fail("schedule must be a JSON list");
  ControlSchedule sched;
  for (const auto& e : doc) {
    sched.segments.push_back({field<double>(e, "duration", "schedule segment"),
                              field<int>(e, "index", "schedule segment"),
                              field<int>(e, "sign", "schedule segment")});
  }
  return sched;
}

Eigen::MatrixXd matrix_from_json(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_array() || doc.empty()) parse_fail("matrix must be a nonempty JSON list");
  std::vector<double> flat;
  Eigen::Index d = 0;
  try {
    if (doc.front().is_array()) {
      d = static_cast<Eigen::Index>(doc.size());
      for (const auto& row : doc) {
        const auto values = row.get<std::vector<double>>();
        if (static_cast<Eigen::Index>(values.size()) != d) parse_fail("matrix must be square");
        flat.insert(flat.end(), values.begin(), values.end());
      }
    } else {
      flat = doc.get<std::vector<double>>();
      d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
      if (d * d != static_cast<Eigen::Index>(flat.size())) parse_fail("matrix must be square");
    }
  } catch (const json::exception&) {
    parse_fail("matrix entries must be numbers");
  }
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = flat[static_cast<std::size_t>(i * d + j)];
  }
  return m;
}

}  // namespace liegeo
