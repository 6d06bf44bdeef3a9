#include "ot/data.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>

#include "ot/rng.hpp"

namespace ot {

TransportProblem synthetic_instance(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw DimensionMismatch("synthetic instance needs n, m >= 1");
  Rng rng(seed);
  // Draw order is part of the format: a, then b, then C row by row.
  Vector a(n), b(m);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = rng.next_double();
  for (Eigen::Index j = 0; j < m; ++j) b[j] = rng.next_double();
  Matrix C(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) C(i, j) = rng.next_double();
  }
  a /= a.sum();
  b /= b.sum();
  C /= C.sum();
  return make_problem(std::move(a), std::move(b), std::move(C), 1.0);
}

TransportProblem with_epsilon(TransportProblem p, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw OtError("epsilon must be positive and finite");
  }
  p.epsilon = epsilon;
  p.epsilon_original = epsilon;
  return p;
}

SampledPixels sample_pixels(const Image& img, int n, std::uint64_t seed) {
  const int total = img.pixel_count();
  if (n < 1) throw OtError("sample_pixels needs n >= 1");
  if (total < n) {
    throw ImageTooSmall(fmt::format("image has {} pixels, need {}", total, n));
  }
  Rng rng(seed);
  std::vector<int> idx(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) idx[static_cast<size_t>(i)] = i;
  SampledPixels out;
  out.indices.resize(static_cast<size_t>(n));
  out.colors.points.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    const auto j = static_cast<size_t>(i) +
                   rng.next_below(static_cast<std::uint64_t>(total - i));
    std::swap(idx[static_cast<size_t>(i)], idx[j]);
    const int pix = idx[static_cast<size_t>(i)];
    out.indices[static_cast<size_t>(i)] = pix;
    const std::uint8_t* c = img.px(pix);
    for (int ch = 0; ch < 3; ++ch) {
      out.colors.points(i, ch) = static_cast<double>(c[ch]) / 255.0;
    }
  }
  return out;
}

CostMatrix cost_sqeuclidean(const PointCloud& x, const PointCloud& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("point clouds have different dimensions");
  CostMatrix out;
  out.C.resize(x.size(), y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      out.C(i, j) = (x.points.row(i) - y.points.row(j)).squaredNorm();
    }
  }
  out.raw_min = out.C.minCoeff();
  out.raw_max = out.C.maxCoeff();
  if (out.raw_max > 0.0) out.C /= out.raw_max;
  return out;
}

CostMatrix cost_cosine(const Matrix& x_unit, const Matrix& y_unit, CosineNormalization norm) {
  if (x_unit.cols() != y_unit.cols()) {
    throw DimensionMismatch("embedding dimensions differ");
  }
  for (const Matrix* m : {&x_unit, &y_unit}) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      if (std::abs(m->row(i).norm() - 1.0) > 1e-6) {
        throw OtError(fmt::format("cosine cost expects unit rows, row {} has norm {:.6g}",
                                  i, m->row(i).norm()));
      }
    }
  }
  CostMatrix out;
  out.C.resize(x_unit.rows(), y_unit.rows());
  out.C.noalias() = -(x_unit * y_unit.transpose());
  out.C.array() += 1.0;
  out.raw_min = out.C.minCoeff();
  out.raw_max = out.C.maxCoeff();
  if (norm == CosineNormalization::HalfRange) {
    out.C /= 2.0;
  } else if (out.raw_max - out.raw_min > 1e-15) {
    out.C = (out.C.array() - out.raw_min) / (out.raw_max - out.raw_min);
  } else {
    out.C.setZero();  // constant cost carries no signal
  }
  return out;
}

WordVectors load_word_vectors(const std::string& path, int n) {
  std::ifstream is(path);
  if (!is) throw IoError(fmt::format("cannot open {}", path));
  std::string line;
  if (!std::getline(is, line)) throw MalformedLine(fmt::format("{}: empty file", path));
  long declared = 0, dim = 0;
  {
    std::istringstream head(line);
    if (!(head >> declared >> dim) || declared < 0 || dim < 1) {
      throw MalformedLine(fmt::format("{}: header must be 'count dim'", path));
    }
  }
  WordVectors out;
  out.vectors.resize(n, dim);
  std::unordered_set<std::string> seen;
  int kept = 0;
  long line_no = 1;
  while (kept < n && std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word.empty()) throw MalformedLine(fmt::format("{}:{}: missing word", path, line_no));
    if (!seen.insert(word).second) {
      std::cerr << fmt::format("load_word_vectors: duplicate '{}' at {}:{} skipped\n",
                               word, path, line_no);
      continue;
    }
    for (long d = 0; d < dim; ++d) {
      double value;
      if (!(ls >> value)) {
        throw MalformedLine(
            fmt::format("{}:{}: expected {} values for '{}'", path, line_no, dim, word));
      }
      out.vectors(kept, d) = value;
    }
    double trailing;
    if (ls >> trailing) {
      throw MalformedLine(fmt::format("{}:{}: more than {} values", path, line_no, dim));
    }
    const double norm = out.vectors.row(kept).norm();
    if (norm < 1e-12) {
      throw ZeroVector(fmt::format("{}:{}: '{}' has zero norm", path, line_no, word));
    }
    out.vectors.row(kept) /= norm;
    out.words.push_back(word);
    ++kept;
  }
  if (kept < n) {
    throw VocabularyTooSmall(
        fmt::format("{} holds {} distinct words, need {}", path, kept, n));
  }
  return out;
}

BilingualDictionary load_dictionary(const std::string& path, const WordVectors& src,
                                    const WordVectors& tgt) {
  std::ifstream is(path);
  if (!is) throw IoError(fmt::format("cannot open {}", path));

  std::unordered_map<std::string, int> src_idx, tgt_idx;
  for (size_t i = 0; i < src.words.size(); ++i) {
    src_idx.emplace(src.words[i], static_cast<int>(i));
  }
  for (size_t i = 0; i < tgt.words.size(); ++i) {
    tgt_idx.emplace(tgt.words[i], static_cast<int>(i));
  }

  BilingualDictionary dict;
  std::unordered_set<long long> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string s, t, extra;
    if (!(ls >> s >> t) || (ls >> extra)) {
      throw MalformedLine(fmt::format("{}:{}: expected 'source target'", path, line_no));
    }
    const auto si = src_idx.find(s);
    const auto ti = tgt_idx.find(t);
    if (si == src_idx.end() || ti == tgt_idx.end()) continue;
    const long long key =
        static_cast<long long>(si->second) * (1LL << 32) + ti->second;
    if (seen.insert(key).second) dict.pairs.emplace_back(si->second, ti->second);
  }
  return dict;
}

void write_instance_csv(const std::string& path, const TransportProblem& p) {
  validate_problem(p);
  std::ofstream os(path);
  if (!os) throw IoError(fmt::format("cannot write {}", path));
  os << "name,index,value\n";
  os << fmt::format("n,0,{}\n", p.n());
  os << fmt::format("m,0,{}\n", p.m());
  os << fmt::format("epsilon,0,{:.17g}\n", p.epsilon);
  for (Eigen::Index i = 0; i < p.n(); ++i) os << fmt::format("a,{},{:.17g}\n", i, p.a[i]);
  for (Eigen::Index j = 0; j < p.m(); ++j) os << fmt::format("b,{},{:.17g}\n", j, p.b[j]);
  for (Eigen::Index i = 0; i < p.n(); ++i) {
    for (Eigen::Index j = 0; j < p.m(); ++j) {
      os << fmt::format("C,{},{:.17g}\n", i * p.m() + j, p.C(i, j));
    }
  }
  if (!os) throw IoError(fmt::format("short write to {}", path));
}

TransportProblem read_instance_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(fmt::format("cannot open {}", path));
  std::string line;
  if (!std::getline(is, line) || line != "name,index,value") {
    throw MalformedLine(fmt::format("{}: missing 'name,index,value' header", path));
  }
  Eigen::Index n = -1, m = -1;
  double epsilon = -1.0;
  std::vector<double> a, b, c;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw MalformedLine(fmt::format("{}:{}: expected three fields", path, line_no));
    }
    const std::string name = line.substr(0, c1);
    const long index = std::strtol(line.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr, 10);
    const double value = std::strtod(line.c_str() + c2 + 1, nullptr);
    if (name == "n") {
      n = static_cast<Eigen::Index>(value);
    } else if (name == "m") {
      m = static_cast<Eigen::Index>(value);
    } else if (name == "epsilon") {
      epsilon = value;
    } else if (name == "a" || name == "b" || name == "C") {
      auto& dst = name == "a" ? a : name == "b" ? b : c;
      if (static_cast<size_t>(index) != dst.size()) {
        throw MalformedLine(fmt::format("{}:{}: {} index {} out of order", path, line_no,
                                        name, index));
      }
      dst.push_back(value);
    } else {
      throw MalformedLine(fmt::format("{}:{}: unknown field '{}'", path, line_no, name));
    }
  }
  if (n < 1 || m < 1 || !(epsilon > 0.0)) {
    throw MalformedLine(fmt::format("{}: missing n / m / epsilon", path));
  }
  if (static_cast<Eigen::Index>(a.size()) != n || static_cast<Eigen::Index>(b.size()) != m ||
      static_cast<Eigen::Index>(c.size()) != n * m) {
    throw MalformedLine(fmt::format("{}: entry counts do not match n = {}, m = {}", path, n, m));
  }
  Vector av = Eigen::Map<Vector>(a.data(), n);
  Vector bv = Eigen::Map<Vector>(b.data(), m);
  Matrix C = Eigen::Map<Matrix>(c.data(), n, m);
  return make_problem(std::move(av), std::move(bv), std::move(C), epsilon);
}

}  // namespace ot
