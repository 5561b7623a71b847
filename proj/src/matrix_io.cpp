#include "permanental/matrix_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace perm {

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  const Eigen::Index n = Eigen::Index(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (Eigen::Index(rows[i].size()) != n)
      throw PreconditionViolated("matrix row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                 " entries, expected " + std::to_string(n));
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  if (!m.allFinite()) throw PreconditionViolated("matrix has a non-finite entry");
  return m;
}

}  // namespace

Matrix parse_matrix(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw PreconditionViolated("empty matrix input");
  std::vector<std::vector<double>> rows;
  if (text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw PreconditionViolated(std::string("matrix JSON: ") + e.what());
    }
    if (!j.contains("rows") || !j["rows"].is_array()) throw PreconditionViolated("matrix JSON needs a \"rows\" array");
    try {
      rows = j["rows"].get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw PreconditionViolated(std::string("matrix JSON rows: ") + e.what());
    }
    if (j.contains("n") && j["n"].get<long>() != long(rows.size()))
      throw PreconditionViolated("matrix JSON: \"n\" does not match the number of rows");
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::vector<double> row;
      std::string tok;
      while (ls >> tok) {
        try {
          size_t used = 0;
          row.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw PreconditionViolated("matrix text: cannot parse \"" + tok + "\"");
        }
      }
      if (!row.empty()) rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) throw PreconditionViolated("matrix has no rows");
  return from_rows(rows);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionViolated("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix read_matrix_file(const std::string& path) { return parse_matrix(read_text_file(path)); }

std::string matrix_to_json(const Matrix& m) {
  nlohmann::ordered_json j;
  j["n"] = m.rows();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace perm
