#include "fatoulab/map_io.hpp"

#include <fstream>
#include <sstream>

namespace fatoulab {

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }

const Json& field(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("missing field '" + std::string(key) + "' at " + (where.empty() ? "/" : where));
  return *it;
}

ComplexList complex_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError("expected an array of complex scalars at " + where);
  ComplexList out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_from_json(j[i], child(where, std::to_string(i))));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParseError("trailing characters in number '" + s + "'");
  return v;
}

}  // namespace

Complex complex_from_json(const Json& j, const std::string& where) {
  const std::string at = where.empty() ? "/" : where;
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError("expected complex scalar [re, im] at " + at);
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

MapExpr map_from_json(const Json& j, const std::string& where) {
  const std::string at = where.empty() ? "/" : where;
  if (!j.is_object()) throw ParseError("expected a map node object at " + at);
  const Json& opj = field(j, "op", where);
  if (!opj.is_string()) throw ParseError("'op' must be a string at " + child(where, "op"));
  const std::string op = opj.get<std::string>();
  auto cplx = [&](const char* key) { return complex_from_json(field(j, key, where), child(where, key)); };
  auto sub = [&](const char* key) { return map_from_json(field(j, key, where), child(where, key)); };

  try {
    if (op == "var") return var();
    if (op == "const") return constant(cplx("value"));
    if (op == "poly") return poly(complex_list(field(j, "coeffs", where), child(where, "coeffs")));
    if (op == "mobius") return mobius(cplx("a"), cplx("b"), cplx("c"), cplx("d"));
    if (op == "pow") {
      const Json& k = field(j, "k", where);
      if (!k.is_number_integer() || k.get<long long>() < 1)
        throw ParseError("'k' must be a positive integer at " + child(where, "k"));
      return power(sub("inner"), k.get<int>());
    }
    if (op == "compose") return compose(sub("outer"), sub("inner"));
    if (op == "mul") return mul(sub("left"), sub("right"));
    if (op == "add") return add(sub("left"), sub("right"));
    if (op == "exp") return exp_of(sub("inner"));
    if (op == "affine") return affine(cplx("scale"), cplx("shift"));
    if (op == "blaschke") return blaschke_factor(cplx("a"));
    if (op == "arnoldi_poly") {
      ArnoldiBasis b;
      b.center = cplx("center");
      b.scale = field(j, "scale", where).get<double>();
      b.derivative_order = j.value("derivative_order", 0);
      const ComplexList c = complex_list(field(j, "coeffs", where), child(where, "coeffs"));
      b.coeffs = Eigen::Map<const Eigen::VectorXcd>(c.data(), static_cast<Eigen::Index>(c.size()));
      const Json& H = field(j, "H", where);
      const auto n = static_cast<Eigen::Index>(c.size());
      if (!H.is_array() || static_cast<Eigen::Index>(H.size()) != n)
        throw ParseError("'H' must have one row per coefficient at " + child(where, "H"));
      b.H = Eigen::MatrixXcd::Zero(n, n - 1);
      for (Eigen::Index r = 0; r < n; ++r) {
        const ComplexList row = complex_list(H[static_cast<std::size_t>(r)], child(child(where, "H"), std::to_string(r)));
        if (static_cast<Eigen::Index>(row.size()) != n - 1)
          throw ParseError("ragged Hessenberg row at " + child(child(where, "H"), std::to_string(r)));
        for (Eigen::Index col = 0; col < n - 1; ++col) b.H(r, col) = row[static_cast<std::size_t>(col)];
      }
      return arnoldi_poly(std::move(b));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("bad field type at ") + at + ": " + e.what());
  } catch (const InputError& e) {
    throw ParseError(std::string(e.what()) + " (at " + at + ")");
  }
  throw ParseError("unknown op '" + op + "' at " + child(where, "op"));
}

Json map_to_json(const MapExpr& e) {
  Json j;
  j["op"] = op_name(e.op());
  switch (e.op()) {
    case Op::Var: break;
    case Op::Const: j["value"] = complex_to_json(e.const_value()); break;
    case Op::Poly: {
      Json c = Json::array();
      for (auto z : e.coefficients()) c.push_back(complex_to_json(z));
      j["coeffs"] = c;
      break;
    }
    case Op::Mobius:
      j["a"] = complex_to_json(e.mobius_a());
      j["b"] = complex_to_json(e.mobius_b());
      j["c"] = complex_to_json(e.mobius_c());
      j["d"] = complex_to_json(e.mobius_d());
      break;
    case Op::Pow:
      j["k"] = e.exponent();
      j["inner"] = map_to_json(e.lhs());
      break;
    case Op::Compose:
      j["outer"] = map_to_json(e.lhs());
      j["inner"] = map_to_json(e.rhs());
      break;
    case Op::Mul:
    case Op::Add:
      j["left"] = map_to_json(e.lhs());
      j["right"] = map_to_json(e.rhs());
      break;
    case Op::Exp: j["inner"] = map_to_json(e.lhs()); break;
    case Op::Affine:
      j["scale"] = complex_to_json(e.affine_scale());
      j["shift"] = complex_to_json(e.affine_shift());
      break;
    case Op::ArnoldiPoly: {
      const ArnoldiBasis& b = e.basis();
      j["center"] = complex_to_json(b.center);
      j["scale"] = b.scale;
      j["derivative_order"] = b.derivative_order;
      Json c = Json::array();
      for (Eigen::Index i = 0; i < b.coeffs.size(); ++i) c.push_back(complex_to_json(b.coeffs(i)));
      j["coeffs"] = c;
      Json H = Json::array();
      for (Eigen::Index r = 0; r < b.H.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index col = 0; col < b.H.cols(); ++col) row.push_back(complex_to_json(b.H(r, col)));
        H.push_back(row);
      }
      j["H"] = H;
      break;
    }
  }
  return j;
}

Complex parse_complex_literal(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ParseError("empty complex literal");
  if (s.back() != 'i') return {parse_real(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split point: last sign that is not leading and not an exponent sign.
  std::size_t cut = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_of = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (cut == std::string::npos) return {0.0, imag_of(body)};
  return {parse_real(body.substr(0, cut)), imag_of(body.substr(cut))};
}

MapExpr parse_map_spec(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ParseError("empty map spec");
  if (s.front() == '{') {
    Json j;
    try {
      j = Json::parse(s);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("map spec JSON: ") + e.what());
    }
    return map_from_json(j);
  }
  if (s.front() == '@') {
    std::ifstream in(s.substr(1));
    if (!in) throw ParseError("cannot open map file '" + s.substr(1) + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_map_spec(ss.str());
  }
  if (s == "var" || s == "z") return var();
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("unknown map spec '" + s + "'");
  const std::string head = s.substr(0, colon);
  const std::string rest = s.substr(colon + 1);
  auto nums = [&](std::size_t want) {
    ComplexList out;
    for (const auto& t : split(rest, ',')) out.push_back(parse_complex_literal(t));
    if (want && out.size() != want)
      throw ParseError(head + ": expected " + std::to_string(want) + " values, got " + std::to_string(out.size()));
    return out;
  };
  try {
    if (head == "const") return constant(nums(1)[0]);
    if (head == "poly") return poly(nums(0));
    if (head == "affine") {
      const auto v = nums(2);
      return affine(v[0], v[1]);
    }
    if (head == "mobius") {
      const auto v = nums(4);
      return mobius(v[0], v[1], v[2], v[3]);
    }
    if (head == "blaschke") return blaschke_factor(nums(1)[0]);
    if (head == "exp") return exp_of(parse_map_spec(rest));
    if (head == "pow") {
      const auto c2 = rest.find(':');
      if (c2 == std::string::npos) throw ParseError("pow: expected pow:k:<spec>");
      const double k = parse_real(rest.substr(0, c2));
      if (k < 1 || k != std::floor(k)) throw ParseError("pow: k must be a positive integer");
      return power(parse_map_spec(rest.substr(c2 + 1)), static_cast<int>(k));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(std::string(e.what()) + " (in '" + s + "')");
  }
  throw ParseError("unknown map spec head '" + head + "'");
}

}  // namespace fatoulab
