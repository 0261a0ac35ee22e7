#include "qbayes/model_io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace qbayes {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::validation, where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::validation, where + ": missing field '" + key + "'");
  return *it;
}

double real_of(const json& v, const std::string& where) {
  if (!v.is_number()) fail(ErrorKind::validation, where + ": expected a number");
  return v.get<double>();
}

RealVector real_vector(const json& v, const std::string& where) {
  if (!v.is_array()) fail(ErrorKind::validation, where + ": expected a list of numbers");
  RealVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = real_of(v[i], where);
  return out;
}

RealMatrix real_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(ErrorKind::validation, where + ": expected a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(v.size());
  const auto cols = v[0].is_array() ? static_cast<Eigen::Index>(v[0].size()) : 0;
  RealMatrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::validation, where + ": ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = real_of(row[static_cast<std::size_t>(c)], where);
  }
  return out;
}

ComplexMatrix complex_matrix(const json& v, Eigen::Index dim, const std::string& where) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
    fail(ErrorKind::validation, where + ": expected " + std::to_string(dim) + " rows");
  }
  ComplexMatrix out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      fail(ErrorKind::validation, where + ": expected " + std::to_string(dim) + " columns");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        out(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        out(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(ErrorKind::validation, where + ": entries must be numbers or [re, im] pairs");
      }
    }
  }
  return out;
}

json to_json(const ComplexMatrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RealMatrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

StatisticalModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "invalid JSON at line " << line << ", column " << col << ": " << e.what();
    fail(ErrorKind::validation, os.str());
  }

  const auto n = static_cast<Eigen::Index>(real_of(field(doc, "n", "model"), "model.n"));
  const auto d = static_cast<Eigen::Index>(real_of(field(doc, "d", "model"), "model.d"));
  if (n < 1 || d < 1) fail(ErrorKind::validation, "model: n and d must be positive");

  const json& wj = field(doc, "weight", "model");
  if (!wj.is_object()) fail(ErrorKind::validation, "model.weight: expected an object");
  std::optional<WeightSpec> weight;
  if (wj.contains("constant")) {
    weight = WeightSpec::constant(real_matrix(wj["constant"], "weight.constant"));
  } else if (wj.contains("per_point")) {
    const json& list = wj["per_point"];
    if (!list.is_array()) fail(ErrorKind::validation, "weight.per_point: expected a list of matrices");
    std::vector<RealMatrix> ws;
    for (const auto& w : list) ws.push_back(real_matrix(w, "weight.per_point"));
    weight = WeightSpec::per_point(std::move(ws));
  } else {
    fail(ErrorKind::validation, "model.weight: expected 'constant' or 'per_point'");
  }

  const json& pj = field(doc, "points", "model");
  if (!pj.is_array()) fail(ErrorKind::validation, "model.points: expected a list");
  if (pj.empty()) fail(ErrorKind::empty_model, "model has no grid points");
  std::vector<GridPoint> points;
  std::vector<RealVector> scores;
  bool any_score = false;
  bool all_score = true;
  for (std::size_t m = 0; m < pj.size(); ++m) {
    const std::string where = "points[" + std::to_string(m) + "]";
    const json& p = pj[m];
    GridPoint g;
    g.theta = real_vector(field(p, "theta", where), where + ".theta");
    if (g.theta.size() != n) fail(ErrorKind::validation, where + ".theta: expected length " + std::to_string(n));
    g.weight = real_of(field(p, "weight", where), where + ".weight");
    try {
      g.state = DensityMatrix(complex_matrix(field(p, "rho", where), d, where + ".rho"));
    } catch (const Error& e) {
      fail(ErrorKind::validation, where + ".rho: " + e.what());
    }
    if (p.contains("drho")) {
      const json& dj = p["drho"];
      if (!dj.is_array() || static_cast<Eigen::Index>(dj.size()) != n) {
        fail(ErrorKind::validation, where + ".drho: expected " + std::to_string(n) + " matrices");
      }
      std::vector<HermitianMatrix> ds;
      for (const auto& x : dj) ds.emplace_back(complex_matrix(x, d, where + ".drho"));
      g.derivatives = std::move(ds);
    }
    if (p.contains("score")) {
      any_score = true;
      scores.push_back(real_vector(p["score"], where + ".score"));
    } else {
      all_score = false;
    }
    points.push_back(std::move(g));
  }
  if (any_score && !all_score) fail(ErrorKind::validation, "score must be given for every point or none");
  std::optional<std::vector<RealVector>> score;
  if (any_score) score = std::move(scores);
  return {std::move(points), std::move(*weight), std::move(score)};
}

StatisticalModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::validation, "cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string dump_model(const StatisticalModel& model, int indent) {
  json doc;
  doc["n"] = model.n();
  doc["d"] = model.d();
  if (model.weight().is_constant()) {
    doc["weight"] = {{"constant", to_json(model.weight().constant_matrix())}};
  } else {
    json list = json::array();
    for (const auto& w : model.weight().matrices()) list.push_back(to_json(w));
    doc["weight"] = {{"per_point", std::move(list)}};
  }
  json points = json::array();
  for (std::size_t m = 0; m < model.size(); ++m) {
    const GridPoint& g = model.point(m);
    json p;
    p["theta"] = to_json(g.theta);
    p["weight"] = g.weight;
    p["rho"] = to_json(g.state.mat());
    if (g.derivatives) {
      json ds = json::array();
      for (const auto& x : *g.derivatives) ds.push_back(to_json(x.mat()));
      p["drho"] = std::move(ds);
    }
    if (model.prior_score()) p["score"] = to_json((*model.prior_score())[m]);
    points.push_back(std::move(p));
  }
  doc["points"] = std::move(points);
  return doc.dump(indent) + "\n";
}

void save_model(const StatisticalModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::validation, "cannot write '" + path.string() + "'");
  out << dump_model(model);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::numerical_failure, "SHA-256 digest failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

}  // namespace qbayes
