#include "fretfrag/equivalence.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <thread>

#include "fretfrag/refactor.hpp"

namespace fretfrag {

const char* to_string(EquivConfig::Mode mode) {
  switch (mode) {
    case EquivConfig::Mode::Exhaustive: return "exhaustive";
    case EquivConfig::Mode::Random: return "random";
    case EquivConfig::Mode::Auto: return "auto";
  }
  return "?";
}

const char* to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::BoundedEquivalent: return "BoundedEquivalent";
    case Verdict::Kind::NotEquivalent: return "NotEquivalent";
    case Verdict::Kind::SampledConsistent: return "SampledConsistent";
  }
  return "?";
}

std::string to_text(const Verdict& v) {
  std::string out = to_string(v.kind);
  switch (v.kind) {
    case Verdict::Kind::BoundedEquivalent:
      out += " (tracesChecked=" + std::to_string(v.traces_checked) + ")";
      break;
    case Verdict::Kind::SampledConsistent:
      out += " (samples=" + std::to_string(v.traces_checked) + ")";
      break;
    case Verdict::Kind::NotEquivalent:
      out += std::string(" (left=") + (v.left_value ? "true" : "false") +
             ", right=" + (v.right_value ? "true" : "false") +
             ", tracesChecked=" + std::to_string(v.traces_checked) + ")\n";
      out += "witness (length " + std::to_string(v.witness->length()) + "):\n";
      out += v.witness->to_text();
      if (!out.empty() && out.back() == '\n') out.pop_back();
      break;
  }
  return out;
}

namespace {

// Spreads the low a*k bits of `index` into one tick mask per atom.
void unpack_index(std::uint64_t index, std::size_t atoms, int length, std::uint64_t* masks) {
  for (std::size_t j = 0; j < atoms; ++j) masks[j] = 0;
  for (int t = 0; t < length; ++t) {
    for (std::size_t j = 0; j < atoms; ++j) {
      masks[j] |= (index & 1ULL) << t;
      index >>= 1;
    }
  }
}

Trace trace_from_masks(const std::vector<Atom>& atoms, int length,
                       const std::vector<std::uint64_t>& masks) {
  std::vector<std::vector<bool>> steps(static_cast<std::size_t>(length),
                                       std::vector<bool>(atoms.size(), false));
  for (int t = 0; t < length; ++t) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      steps[static_cast<std::size_t>(t)][j] = (masks[j] >> t) & 1ULL;
    }
  }
  return Trace(atoms, std::move(steps));
}

struct Engine {
  const CompiledRequirement& left;
  const CompiledRequirement& right;
  std::size_t atom_count;

  bool differs(const std::uint64_t* masks, int length) const {
    std::span<const std::uint64_t> view(masks, atom_count);
    return left.evaluate(view, length) != right.evaluate(view, length);
  }

  // Smallest index in [0, total) whose trace distinguishes the two
  // requirements, or `total` if none does.
  std::uint64_t first_difference(int length, std::uint64_t total, unsigned workers) const {
    auto scan = [&](std::uint64_t from, std::uint64_t to, const std::atomic<std::uint64_t>* best) {
      std::vector<std::uint64_t> masks(std::max<std::size_t>(atom_count, 1));
      for (std::uint64_t i = from; i < to; ++i) {
        if (best && (i & 0xfff) == 0 && best->load(std::memory_order_relaxed) < i) return to;
        unpack_index(i, atom_count, length, masks.data());
        if (differs(masks.data(), length)) return i;
      }
      return to;
    };
    if (workers <= 1 || total < 4096) return scan(0, total, nullptr);

    std::atomic<std::uint64_t> best{total};
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t from = std::min<std::uint64_t>(total, w * chunk);
      const std::uint64_t to = std::min<std::uint64_t>(total, from + chunk);
      pool.emplace_back([&, from, to] {
        const std::uint64_t hit = scan(from, to, &best);
        if (hit < to) {
          std::uint64_t cur = best.load();
          while (hit < cur && !best.compare_exchange_weak(cur, hit)) {
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    return best.load();
  }
};

std::vector<Atom> atom_universe(const Requirement& left, const Requirement& right) {
  auto all = atoms_of(left);
  all.merge(atoms_of(right));
  std::vector<Atom> out;
  for (auto& [text, atom] : all) out.push_back(atom);
  return out;
}

}  // namespace

Trace trace_at(const std::vector<Atom>& atoms, int length, std::uint64_t index) {
  std::vector<std::uint64_t> masks(std::max<std::size_t>(atoms.size(), 1));
  unpack_index(index, atoms.size(), length, masks.data());
  masks.resize(atoms.size());
  return trace_from_masks(atoms, length, masks);
}

Verdict equivalent_inlined(const Requirement& left, const Requirement& right,
                           const EquivConfig& cfg) {
  if (cfg.max_len < 1 || cfg.max_len > 64) {
    throw Error(ErrorKind::InvalidArgument, "max-len must be between 1 and 64");
  }
  if (cfg.samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be at least 1");

  Verdict v;
  v.atoms = atom_universe(left, right);
  const std::size_t a = v.atoms.size();
  const CompiledRequirement lc(left, v.atoms);
  const CompiledRequirement rc(right, v.atoms);
  Engine engine{lc, rc, a};

  EquivConfig::Mode mode = cfg.mode;
  if (mode == EquivConfig::Mode::Auto) {
    mode = static_cast<int>(a) <= cfg.max_atoms_exhaustive ? EquivConfig::Mode::Exhaustive
                                                           : EquivConfig::Mode::Random;
  }
  v.mode = mode;

  auto record_witness = [&](int length, const std::vector<std::uint64_t>& masks) {
    v.kind = Verdict::Kind::NotEquivalent;
    v.witness = trace_from_masks(v.atoms, length, masks);
    v.left_value = lc.evaluate(masks, length);
    v.right_value = rc.evaluate(masks, length);
  };

  if (mode == EquivConfig::Mode::Exhaustive) {
    if (static_cast<int>(a) > cfg.max_atoms_exhaustive) {
      throw Error(ErrorKind::AtomBudgetExceeded,
                  std::to_string(a) + " atoms exceed the exhaustive budget of " +
                      std::to_string(cfg.max_atoms_exhaustive),
                  std::nullopt, {std::to_string(a)});
    }
    if (a * static_cast<std::size_t>(cfg.max_len) > 62) {
      throw Error(ErrorKind::AtomBudgetExceeded,
                  "trace space 2^" + std::to_string(a * cfg.max_len) + " is too large to enumerate",
                  std::nullopt, {std::to_string(a)});
    }
    unsigned workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                        : cfg.workers;
    for (int k = 1; k <= cfg.max_len; ++k) {
      const std::uint64_t total = 1ULL << (a * static_cast<std::size_t>(k));
      const std::uint64_t hit = engine.first_difference(k, total, workers);
      if (hit < total) {
        v.traces_checked += hit + 1;
        std::vector<std::uint64_t> masks(std::max<std::size_t>(a, 1));
        unpack_index(hit, a, k, masks.data());
        masks.resize(a);
        record_witness(k, masks);
        return v;
      }
      v.traces_checked += total;
    }
    v.kind = Verdict::Kind::BoundedEquivalent;
    return v;
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::uint64_t> masks(a);
  for (std::uint64_t s = 0; s < cfg.samples; ++s) {
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.max_len));
    const std::uint64_t keep = k >= 64 ? ~0ULL : (1ULL << k) - 1;
    for (auto& m : masks) m = rng() & keep;
    ++v.traces_checked;
    if (engine.differs(masks.data(), k)) {
      record_witness(k, masks);
      return v;
    }
  }
  v.kind = Verdict::Kind::SampledConsistent;
  return v;
}

Verdict equivalent(const Requirement& left, const Requirement& right, const RequirementSet& set,
                   const EquivConfig& cfg) {
  return equivalent_inlined(combine_templates(left, set), combine_templates(right, set), cfg);
}

std::size_t RefactorReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const Entry& e) { return !e.verdict.passed(); }));
}

RefactorReport check_refactoring(const RequirementSet& before, const RequirementSet& after,
                                 const EquivConfig& cfg) {
  std::vector<std::string> mismatched;
  for (const auto& r : before.requirements()) {
    if (!after.find_requirement(r.id)) mismatched.push_back(r.id);
  }
  for (const auto& r : after.requirements()) {
    if (!before.find_requirement(r.id)) mismatched.push_back(r.id);
  }
  if (!mismatched.empty()) {
    std::string list;
    for (const auto& id : mismatched) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorKind::IdMismatch, "requirement ids present in only one set: " + list,
                std::nullopt, mismatched);
  }
  RefactorReport report;
  for (const auto& r : before.requirements()) {
    const Requirement left = combine_templates(r, before);
    const Requirement right = combine_templates(after.requirement(r.id), after);
    report.entries.push_back({r.id, equivalent_inlined(left, right, cfg)});
  }
  return report;
}

std::string to_text(const RefactorReport& report) {
  std::size_t width = 2;
  for (const auto& e : report.entries) width = std::max(width, e.id.size());
  std::string out;
  for (const auto& e : report.entries) {
    std::string id = e.id;
    id.resize(width, ' ');
    out += (e.verdict.passed() ? "PASS  " : "FAIL  ") + id + "  " + to_text(e.verdict) + "\n";
  }
  out += std::to_string(report.entries.size() - report.failures()) + "/" +
         std::to_string(report.entries.size()) + " requirements preserved\n";
  return out;
}

}  // namespace fretfrag
