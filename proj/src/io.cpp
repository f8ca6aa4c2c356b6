#include "l2sc/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace l2sc {

namespace {

using json = nlohmann::json;

constexpr int kSnapshotVersion = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path);
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& tok, const std::string& path,
                    size_t lineno) {
  std::string t = trim(tok);
  if (t.empty())
    throw FormatError(path + ": line " + std::to_string(lineno) +
                      ": empty field");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw FormatError(path + ": line " + std::to_string(lineno) +
                      ": bad number '" + t + "'");
  if (!std::isfinite(v))
    throw InvalidInput(path + ": line " + std::to_string(lineno) +
                       ": non-finite value");
  return v;
}

long parse_int(const std::string& tok, const std::string& path,
               size_t lineno) {
  std::string t = trim(tok);
  long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size())
    throw FormatError(path + ": line " + std::to_string(lineno) +
                      ": bad integer '" + t + "'");
  return v;
}

// Physical lines with trailing blank lines dropped; interior blanks stay so
// errors report true line numbers.
std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

bool looks_like_coord_header(const std::string& line) {
  std::istringstream ss(line);
  std::string tok;
  int ints = 0;
  while (ss >> tok) {
    for (char ch : tok)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    ++ints;
    if (ints > 3) return false;
  }
  return ints == 3;
}

Matrix load_coord(const std::vector<std::string>& lines,
                  const std::string& path) {
  std::istringstream head(lines[0]);
  long d = 0, n = 0, nnz = 0;
  head >> d >> n >> nnz;
  if (d < 1 || n < 1 || nnz < 0)
    throw FormatError(path + ": line 1: bad coordinate header");
  if (static_cast<long>(lines.size()) - 1 != nnz)
    throw FormatError(path + ": expected " + std::to_string(nnz) +
                      " entries, file has " +
                      std::to_string(lines.size() - 1));

  Matrix m = Matrix::Zero(d, n);
  for (size_t li = 1; li < lines.size(); ++li) {
    std::istringstream ss(lines[li]);
    std::string rt, ct, vt, extra;
    if (!(ss >> rt >> ct >> vt) || (ss >> extra))
      throw FormatError(path + ": line " + std::to_string(li + 1) +
                        ": expected 'row col value'");
    long r = parse_int(rt, path, li + 1);
    long c = parse_int(ct, path, li + 1);
    double v = parse_double(vt, path, li + 1);
    if (r < 0 || r >= d || c < 0 || c >= n)
      throw FormatError(path + ": line " + std::to_string(li + 1) +
                        ": index out of range");
    m(r, c) += v;
  }
  return m;
}

Matrix load_dense_csv(const std::vector<std::string>& lines,
                      const std::string& path) {
  size_t cols = 0;
  std::vector<std::vector<double>> rows;
  rows.reserve(lines.size());
  for (size_t li = 0; li < lines.size(); ++li) {
    std::vector<std::string> toks = split(lines[li], ',');
    if (li == 0) {
      cols = toks.size();
    } else if (toks.size() != cols) {
      throw FormatError(path + ": line " + std::to_string(li + 1) +
                        ": expected " + std::to_string(cols) +
                        " fields, got " + std::to_string(toks.size()));
    }
    std::vector<double> row;
    row.reserve(cols);
    for (const auto& t : toks) row.push_back(parse_double(t, path, li + 1));
    rows.push_back(std::move(row));
  }
  Matrix m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                        const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw FormatError("snapshot: " + what + ": expected " +
                      std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw FormatError("snapshot: " + what + ": ragged row");
    for (Eigen::Index jx = 0; jx < cols; ++jx) {
      const json& cell = row[static_cast<size_t>(jx)];
      if (!cell.is_number())
        throw FormatError("snapshot: " + what + ": non-numeric entry");
      m(i, jx) = cell.get<double>();
    }
  }
  require_finite(m, "snapshot: " + what);
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Matrix load_matrix(const std::string& path) {
  std::string text = read_file(path);
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw FormatError(path + ": empty file");

  Matrix m;
  if (lines[0].find(',') != std::string::npos) {
    m = load_dense_csv(lines, path);
  } else if (looks_like_coord_header(lines[0])) {
    m = load_coord(lines, path);
  } else {
    m = load_dense_csv(lines, path);  // single-column dense
  }
  require_finite(m, path);
  return m;
}

Labels load_labels(const std::string& path) {
  std::string text = read_file(path);
  std::vector<std::string> lines = split_lines(text);
  Labels out;
  out.reserve(lines.size());
  for (size_t li = 0; li < lines.size(); ++li) {
    long v = parse_int(lines[li], path, li + 1);
    if (v < 0)
      throw FormatError(path + ": line " + std::to_string(li + 1) +
                        ": labels must be nonnegative");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw FormatError(path + ": empty labels file");
  return out;
}

Manifest load_manifest(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError(path + ": manifest must be an object");

  Manifest m;
  try {
    m.k = j.at("k").get<int>();
    m.knn = j.at("knn").get<int>();
    if (j.contains("sigma") && !j["sigma"].is_null())
      m.sigma = j["sigma"].get<double>();
    m.hp.lambda = j.value("lambda", m.hp.lambda);
    m.hp.mu = j.value("mu", m.hp.mu);
    m.hp.eta0 = j.value("eta0", m.hp.eta0);
    m.hp.tol = j.value("tol", m.hp.tol);
    m.hp.max_outer = j.value("max_outer", m.hp.max_outer);
    m.hp.max_inner = j.value("max_inner", m.hp.max_inner);
    m.hp.seed = j.value("seed", m.hp.seed);

    const json& tasks = j.at("tasks");
    if (!tasks.is_array() || tasks.empty())
      throw FormatError(path + ": manifest needs a nonempty tasks array");
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const json& t : tasks) {
      ManifestTask mt;
      mt.task_id = t.at("task_id").get<std::string>();
      mt.matrix_path = (base / t.at("matrix_path").get<std::string>()).string();
      if (t.contains("labels_path") && !t["labels_path"].is_null())
        mt.labels_path = (base / t["labels_path"].get<std::string>()).string();
      for (const auto& seen : m.tasks)
        if (seen.task_id == mt.task_id)
          throw FormatError(path + ": duplicate task_id '" + mt.task_id + "'");
      m.tasks.push_back(std::move(mt));
    }
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (m.k < 2) throw FormatError(path + ": k must be >= 2");
  if (m.knn < 1) throw FormatError(path + ": knn must be >= 1");
  return m;
}

void save_library(const KnowledgeLibrary& lib, const std::string& path) {
  json j;
  j["version"] = kSnapshotVersion;
  j["d"] = lib.d;
  j["k"] = lib.k;
  j["tasks_seen"] = lib.tasks_seen;
  j["b"] = matrix_to_json(lib.basis);
  j["l"] = matrix_to_json(lib.feature_embedding);
  j["m_rec"] = matrix_to_json(lib.kernel_record);
  j["c_rec"] = matrix_to_json(lib.embed_record);
  json per_task = json::array();
  for (const auto& rec : lib.tasks) {
    json t;
    t["task_id"] = rec.task_id;
    t["lambda"] = rec.lambda;
    t["e"] = matrix_to_json(rec.e);
    // Beyond the minimum: the exact record contributions, so a re-presented
    // task can be subtracted precisely even after a resume.
    t["m_contrib"] = matrix_to_json(rec.kernel_contrib);
    t["c_contrib"] = matrix_to_json(rec.embed_contrib);
    per_task.push_back(std::move(t));
  }
  j["per_task"] = std::move(per_task);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write failed on " + path);
}

KnowledgeLibrary load_library(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  try {
    int version = j.at("version").get<int>();
    if (version != kSnapshotVersion)
      throw VersionError(path + ": snapshot version " +
                         std::to_string(version) + ", expected " +
                         std::to_string(kSnapshotVersion));
    int d = j.at("d").get<int>();
    int k = j.at("k").get<int>();
    KnowledgeLibrary lib = init_library(d, k);
    lib.tasks_seen = j.at("tasks_seen").get<int>();
    lib.basis = matrix_from_json(j.at("b"), k, k, "b");
    lib.feature_embedding = matrix_from_json(j.at("l"), d, k, "l");
    lib.kernel_record = matrix_from_json(j.at("m_rec"), k, k, "m_rec");
    lib.embed_record = matrix_from_json(j.at("c_rec"), d, k, "c_rec");

    const json& per_task = j.at("per_task");
    if (!per_task.is_array() ||
        static_cast<int>(per_task.size()) != lib.tasks_seen)
      throw FormatError(path + ": per_task length != tasks_seen");
    for (const json& t : per_task) {
      TaskRecord rec;
      rec.task_id = t.at("task_id").get<std::string>();
      rec.lambda = t.at("lambda").get<double>();
      const json& e = t.at("e");
      Eigen::Index n = static_cast<Eigen::Index>(e.size());
      rec.e = matrix_from_json(e, n, k, "e");
      rec.kernel_contrib = matrix_from_json(t.at("m_contrib"), k, k, "m_contrib");
      rec.embed_contrib = matrix_from_json(t.at("c_contrib"), d, k, "c_contrib");
      lib.tasks.push_back(std::move(rec));
    }
    return lib;
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_results_csv(const std::vector<ResultRow>& rows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "task_id,phase,purity,nmi,rand_index,objective,iters,wall_ms\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.task_id << ',' << r.phase << ',';
    auto metric = [&](const std::optional<double>& v) {
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.12g", *v);
        out << buf;
      }
      out << ',';
    };
    metric(r.purity);
    metric(r.nmi);
    metric(r.rand_index);
    std::snprintf(buf, sizeof(buf), "%.12g", r.objective);
    out << buf << ',' << r.iters << ',';
    std::snprintf(buf, sizeof(buf), "%.3f", r.wall_ms);
    out << buf << '\n';
  }
  if (!out) throw IoError("write failed on " + path);
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed on " + path);
}

void save_labels(const Labels& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (int v : labels) out << v << '\n';
  if (!out) throw IoError("write failed on " + path);
}

}  // namespace l2sc
