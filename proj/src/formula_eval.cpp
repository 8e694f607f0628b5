#include "qtn/formula.hpp"

#include "qtn/errors.hpp"

namespace qtn::dsl {

std::optional<long long> eval(const FormulaAst& node, const EvalEnv& env) {
  switch (node.kind) {
    case NodeKind::Var:
      switch (node.var) {
        case 'a': return env.a;
        case 'b': return env.b;
        case 'c': return env.c;
        case 'd': return env.d;
        case 'i': return env.i;
      }
      throw InternalError("unknown variable");
    case NodeKind::Literal:
      return node.value;
    case NodeKind::Not: {
      auto operand = eval(node.children[0], env);
      if (!operand) return std::nullopt;
      return *operand == 0 ? 1 : 0;
    }
    case NodeKind::And: {
      auto lhs = eval(node.children[0], env);
      if (!lhs || *lhs == 0) return lhs;
      return eval(node.children[1], env);
    }
    case NodeKind::Or: {
      auto lhs = eval(node.children[0], env);
      if (!lhs || *lhs != 0) return lhs;
      return eval(node.children[1], env);
    }
    default:
      break;
  }
  auto lhs = eval(node.children[0], env);
  if (!lhs) return std::nullopt;
  auto rhs = eval(node.children[1], env);
  if (!rhs) return std::nullopt;
  long long out = 0;
  switch (node.kind) {
    case NodeKind::Add:
      if (__builtin_add_overflow(*lhs, *rhs, &out)) return std::nullopt;
      return out;
    case NodeKind::Sub:
      if (__builtin_sub_overflow(*lhs, *rhs, &out)) return std::nullopt;
      return out;
    case NodeKind::Mod: {
      if (*rhs <= 0) return std::nullopt;
      long long m = *lhs % *rhs;
      return m < 0 ? m + *rhs : m;
    }
    case NodeKind::Lt: return *lhs < *rhs ? 1 : 0;
    case NodeKind::Gt: return *lhs > *rhs ? 1 : 0;
    case NodeKind::Eq: return *lhs == *rhs ? 1 : 0;
    default:
      throw InternalError("unreachable node kind");
  }
}

std::optional<long long> apply(const FormulaAst& ast, const std::array<long long, 4>& tuple,
                               int n) {
  EvalEnv env{tuple[0], tuple[1], tuple[2], tuple[3], 0, n};
  long long total = 0;
  for (long long i = 1; i <= n; ++i) {
    env.i = i;
    auto value = eval(ast, env);
    if (!value) return std::nullopt;
    if (__builtin_add_overflow(total, *value, &total)) return std::nullopt;
  }
  return total;
}

std::optional<long long> apply(const FormulaAst& ast, const NC3& e, int n) {
  return apply(ast, e.block_tuple(), n);
}

InstanceEnvs InstanceEnvs::of(const SlurpInstance& inst) {
  InstanceEnvs envs;
  envs.n = inst.n;
  envs.tuples.reserve(inst.objects.size());
  for (const auto& p : inst.decode()) envs.tuples.push_back(to_nc3(p).block_tuple());
  return envs;
}

Fingerprint fingerprint(const FormulaAst& ast, const InstanceEnvs& envs) {
  Fingerprint fp;
  fp.values.reserve(envs.tuples.size());
  for (const auto& tuple : envs.tuples) {
    auto value = apply(ast, tuple, envs.n);
    if (!value) return Fingerprint{true, {}};
    fp.values.push_back(*value);
  }
  return fp;
}

Fingerprint fingerprint(const FormulaAst& ast, const SlurpInstance& inst) {
  return fingerprint(ast, InstanceEnvs::of(inst));
}

Distance formula_delta(const FormulaAst& ast, const SlurpInstance& inst,
                       const InstanceEnvs& envs) {
  Fingerprint fp = fingerprint(ast, envs);
  if (fp.invalid) return Distance::infinite();
  return Distance{delta(fp.values, inst), false};
}

}  // namespace qtn::dsl
