#pragma once

// Straight-line re-statement of the trace semantics, written without the
// library's helpers. Slow and obvious on purpose.

#include <vector>

#include "fretfrag/model.hpp"
#include "fretfrag/semantics.hpp"

namespace fretfrag::oracle {

inline bool holds(const BoolExpr& e, const Trace& tr, int t) {
  switch (e.kind()) {
    case ExprKind::Atom: return tr.value(e.atom(), t);
    case ExprKind::Not: return !holds(e.children()[0], tr, t);
    case ExprKind::And: {
      bool v = true;
      for (const auto& c : e.children()) v = v && holds(c, tr, t);
      return v;
    }
    case ExprKind::Or: {
      bool v = false;
      for (const auto& c : e.children()) v = v || holds(c, tr, t);
      return v;
    }
    case ExprKind::Implies: return !holds(e.children()[0], tr, t) || holds(e.children()[1], tr, t);
    case ExprKind::FragmentRef: break;
  }
  throw Error(ErrorKind::InvalidArgument, "oracle needs inlined expressions");
}

inline bool evaluate(const Requirement& r, const Trace& tr) {
  const int n = tr.length();
  std::vector<std::pair<int, int>> segs;
  auto mode = [&](int t) { return tr.value(*r.scope.mode, t); };
  switch (r.scope.kind) {
    case Scope::Kind::Global: segs.push_back({0, n}); break;
    case Scope::Kind::In:
      for (int t = 0; t < n; ++t) {
        if (mode(t) && (t == 0 || !mode(t - 1))) {
          int e = t;
          while (e < n && mode(e)) ++e;
          segs.push_back({t, e});
        }
      }
      break;
    case Scope::Kind::Before: {
      int first = n;
      for (int t = n - 1; t >= 0; --t) {
        if (mode(t)) first = t;
      }
      if (first > 0) segs.push_back({0, first});
      break;
    }
    case Scope::Kind::After: {
      int t = 0;
      while (t < n && !mode(t)) ++t;
      if (t == n) break;
      while (t < n && mode(t)) ++t;
      if (t < n) segs.push_back({t, n});
      break;
    }
  }

  auto cond = [&](int t) {
    for (const auto& c : r.conditions) {
      if (!holds(c.expr, tr, t)) return false;
    }
    return true;
  };
  auto resp = [&](int t) { return holds(r.response, tr, t); };

  for (auto [b, e] : segs) {
    for (int t = b; t < e; ++t) {
      const bool trig = r.conditions.empty() ? t == b : cond(t) && (t == b || !cond(t - 1));
      if (!trig) continue;
      bool ok = true;
      switch (r.timing.kind) {
        case Timing::Kind::Default:
        case Timing::Kind::Always:
          for (int j = t; j < e; ++j) ok = ok && resp(j);
          break;
        case Timing::Kind::Immediately: ok = resp(t); break;
        case Timing::Kind::Never:
          for (int j = t; j < e; ++j) ok = ok && !resp(j);
          break;
        case Timing::Kind::Eventually:
          ok = false;
          for (int j = t; j < e; ++j) ok = ok || resp(j);
          break;
        case Timing::Kind::Until: {
          int s = t;
          while (s < e && !holds(*r.timing.stop, tr, s)) ++s;
          for (int j = t; j < s; ++j) ok = ok && resp(j);
          break;
        }
        case Timing::Kind::Within:
          ok = false;
          for (int j = t; j <= t + r.timing.ticks && j < e; ++j) ok = ok || resp(j);
          break;
        case Timing::Kind::For:
          for (int j = t; j <= t + r.timing.ticks && j < e; ++j) ok = ok && resp(j);
          break;
      }
      if (!ok) return false;
    }
  }
  return true;
}

}  // namespace fretfrag::oracle
