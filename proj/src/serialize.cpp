#include "ncgeo/serialize.hpp"

#include <bit>

namespace ncgeo {

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("matrix: expected a non-empty array of rows");
  const auto rows = j.size();
  const auto cols = j.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& e = j.at(i).at(c);
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("matrix: entries must be [re, im] pairs");
      m(i, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

Json to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const Json& j) {
  const auto rows = j.size();
  const auto cols = j.at(0).size();
  RealMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

Json to_json(const LieBasis& b) {
  Json out;
  out["n"] = b.n;
  out["E"] = Json::array();
  for (const auto& e : b.E) out["E"].push_back(to_json(e));
  out["C"] = Json::array();  // C[m][k][l] as [re, im]
  for (const auto& cm : b.C) out["C"].push_back(to_json(cm));
  out["g"] = to_json(b.g);
  out["sqrt_abs_det_g"] = b.sqrt_abs_det_g;
  return out;
}

Json to_json(const LieRep& rep) {
  Json out;
  out["n"] = rep.basis->n;
  out["r"] = rep.r;
  out["A"] = Json::array();
  for (const auto& a : rep.A) out["A"].push_back(to_json(a));
  return out;
}

LieRep rep_from_json(const Json& j) {
  LieRep rep;
  rep.basis = build_su_basis(j.at("n").get<int>());
  rep.r = j.at("r").get<int>();
  for (const auto& a : j.at("A")) rep.A.push_back(matrix_from_json(a));
  if (static_cast<int>(rep.A.size()) != rep.basis->dim())
    throw std::invalid_argument("rep: expected n^2 - 1 component matrices");
  for (const auto& a : rep.A)
    if (a.rows() != rep.r || a.cols() != rep.r)
      throw std::invalid_argument("rep: components must be r x r");
  return rep;
}

Json to_json(const MatrixForm& f) {
  Json out;
  out["n"] = f.basis->n;
  out["degree"] = f.degree;
  out["rows"] = f.rows;
  Json terms = Json::array();
  for (const auto& [mask, m] : f.coeff) {
    Json term;
    Json indices = Json::array();
    for (int k = 0; k < 32; ++k)
      if (mask & (1u << k)) indices.push_back(k);
    term["indices"] = std::move(indices);
    term["matrix"] = to_json(m);
    terms.push_back(std::move(term));
  }
  out["terms"] = std::move(terms);
  return out;
}

MatrixForm form_from_json(const Json& j, const LieBasisPtr& basis) {
  MatrixForm f = MatrixForm::zero(basis, j.at("degree").get<int>(),
                                  j.at("rows").get<int>());
  for (const auto& term : j.at("terms")) {
    std::uint32_t mask = 0;
    for (const auto& k : term.at("indices")) {
      const int idx = k.get<int>();
      if (idx < 0 || idx >= basis->dim())
        throw std::invalid_argument("form: index out of range");
      mask |= 1u << idx;
    }
    if (std::popcount(mask) != f.degree)
      throw std::invalid_argument("form: tuple length must equal the degree");
    f.add(mask, matrix_from_json(term.at("matrix")));
  }
  return f;
}

Json to_json(const ConnectionForm& conn) {
  Json out;
  out["n"] = conn.basis->n;
  out["r"] = conn.r;
  out["A"] = Json::array();
  for (const auto& a : conn.A) out["A"].push_back(to_json(a));
  return out;
}

ConnectionForm connection_from_json(const Json& j) {
  const LieRep rep = rep_from_json(j);
  return ConnectionForm{rep.basis, rep.r, rep.A};
}

LieSES ses_from_json(const Json& j) {
  LieSES s;
  s.g.dim = j.at("dim").get<int>();
  s.i_dim = j.at("i_dim").get<int>();
  const auto& f = j.at("f");
  if (static_cast<int>(f.size()) != s.g.dim)
    throw std::invalid_argument("sequence: f must have dim components");
  for (const auto& fc : f) s.g.f.push_back(real_matrix_from_json(fc));
  s.validate(1e-9);
  return s;
}

CurvatureSamples curvature_samples_from_json(const Json& j) {
  CurvatureSamples data;
  data.n = j.value("n", 2);
  data.base_dim = j.at("base_dim").get<int>();
  for (const auto& sample : j.at("samples")) {
    data.weight.push_back(sample.at("weight").get<double>());
    std::vector<Matrix> f;
    for (const auto& m : sample.at("F")) f.push_back(matrix_from_json(m));
    data.F.push_back(std::move(f));
  }
  return data;
}

ReductionData reduction_from_json(const Json& j) {
  ReductionData rd;
  rd.n = j.at("n").get<int>();
  rd.h0.dim = j.at("h0").at("dim").get<int>();
  for (const auto& fc : j.at("h0").at("f"))
    rd.h0.f.push_back(real_matrix_from_json(fc));
  for (const auto& l : j.at("lambda")) rd.lambda.push_back(matrix_from_json(l));
  rd.lm_dim = j.at("lm").at("dim").get<int>();
  for (const auto& r : j.at("lm").at("action"))
    rd.lm_action.push_back(real_matrix_from_json(r));
  rd.validate(1e-9);
  return rd;
}

PointAction point_action_from_json(const Json& j, int) {
  PointAction act;
  act.kz.dim = j.at("dim").get<int>();
  for (const auto& fc : j.at("f")) act.kz.f.push_back(real_matrix_from_json(fc));
  act.k_dim = j.value("k_dim", 0);
  if (j.contains("k_on_lm"))
    for (const auto& r : j.at("k_on_lm"))
      act.k_on_lm.push_back(real_matrix_from_json(r));
  if (j.contains("z_matrices"))
    for (const auto& m : j.at("z_matrices"))
      act.z_matrices.push_back(matrix_from_json(m));
  return act;
}

}  // namespace ncgeo
