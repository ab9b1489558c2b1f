#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chrg/errors.hpp"
#include "chrg/term.hpp"

namespace chrg {

using ConstraintId = std::uint32_t;
using RuleId = std::uint32_t;

inline std::uint64_t functor_key(SymId functor, std::size_t arity) {
  return (static_cast<std::uint64_t>(functor) << 16) | (arity & 0xffff);
}

struct Constraint {
  ConstraintId id = 0;
  SymId functor = 0;
  std::vector<Term> args;
  bool alive = true;

  std::size_t arity() const { return args.size(); }
  Term as_term() const { return Term::compound(functor, std::vector<Term>(args)); }
};

// Propagation-history key: rule plus matched head ids in rule-head
// textual order. (r,(1,2)) and (r,(2,1)) are distinct instances.
struct HistKey {
  RuleId rule = 0;
  std::uint8_t n = 0;
  std::array<ConstraintId, 8> ids{};

  bool operator==(const HistKey& o) const {
    if (rule != o.rule || n != o.n) return false;
    for (std::uint8_t i = 0; i < n; ++i)
      if (ids[i] != o.ids[i]) return false;
    return true;
  }
};

struct HistKeyHash {
  std::size_t operator()(const HistKey& k) const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(k.rule);
    mix(k.n);
    for (std::uint8_t i = 0; i < k.n; ++i) mix(k.ids[i]);
    return static_cast<std::size_t>(h);
  }
};

class Trail;

// Global variable bindings produced by guard tells. Trailed.
class Bindings {
 public:
  void bind(VarSerial v, const Term& value, Trail& trail);
  const Term* lookup(VarSerial v) const;

  // Shallow dereference: follows var-to-var chains.
  Term walk(const Term& t) const;
  // Deep substitution through the whole term.
  Term resolve(const Term& t) const;

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

 private:
  friend class Trail;
  std::unordered_map<VarSerial, Term> map_;
};

class PropagationHistory {
 public:
  bool seen(const HistKey& k) const { return set_.count(k) != 0; }
  void record(const HistKey& k, Trail& trail);
  std::size_t size() const { return set_.size(); }

 private:
  friend class Trail;
  std::unordered_set<HistKey, HistKeyHash> set_;
};

class Store {
 public:
  // Inserts a constraint and returns its id. Ids increase monotonically.
  // Args must be ground unless allow_vars is set (hypothesis arguments
  // may carry unbound variables to be filled by later guard tells).
  ConstraintId insert(SymId functor, std::vector<Term> args, Trail& trail,
                      bool allow_vars = false);
  void kill(ConstraintId id, Trail& trail);

  bool alive(ConstraintId id) const;
  const Constraint& get(ConstraintId id) const;

  // Ids of all constraints ever inserted with this functor/arity,
  // ascending; entries may be dead.
  const std::vector<ConstraintId>& candidates(SymId functor, std::size_t arity) const;

  // Ids of constraints whose argument at pos is the integer val, ascending.
  // Null when some constraint of this functor carries a non-integer
  // argument at pos; callers must then scan the full candidate list.
  const std::vector<ConstraintId>* indexed_candidates(SymId functor,
                                                      std::size_t arity,
                                                      std::size_t pos,
                                                      std::int64_t val) const;

  ConstraintId next_id() const { return next_id_; }
  std::size_t live_count() const { return live_; }

  // One live constraint per line, in id order, args resolved through b.
  std::string dump(const Bindings& b) const;

 private:
  friend class Trail;

  struct ArgKey {
    std::uint64_t fk = 0;
    std::uint64_t pos = 0;
    std::int64_t val = 0;
    bool operator==(const ArgKey& o) const {
      return fk == o.fk && pos == o.pos && val == o.val;
    }
  };
  struct ArgKeyHash {
    std::size_t operator()(const ArgKey& k) const {
      std::uint64_t h = 14695981039346656037ull;
      auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
      };
      mix(k.fk);
      mix(k.pos);
      mix(static_cast<std::uint64_t>(k.val));
      return static_cast<std::size_t>(h);
    }
  };
  static std::uint64_t loose_key(std::uint64_t fk, std::size_t pos) {
    return (fk << 16) | (pos & 0xffff);
  }

  std::vector<Constraint> records_;  // records_[id-1]
  std::unordered_map<std::uint64_t, std::vector<ConstraintId>> index_;
  std::unordered_map<ArgKey, std::vector<ConstraintId>, ArgKeyHash> arg_index_;
  std::unordered_map<std::uint64_t, std::uint32_t> loose_;
  ConstraintId next_id_ = 1;
  std::size_t live_ = 0;
};

class Trail {
 public:
  using Mark = std::size_t;

  Mark mark() const { return log_.size(); }
  std::size_t size() const { return log_.size(); }

  void push_insert(ConstraintId id);
  void push_kill(ConstraintId id);
  void push_hist(const HistKey& k);
  void push_bind(VarSerial v);

  // Rewinds store, history, and bindings exactly to their state at m.
  void undo_to(Mark m, Store& store, PropagationHistory& history, Bindings& bindings);

 private:
  enum class Tag : std::uint8_t { Insert, Kill, HistRec, Bind };
  struct Event {
    Tag tag;
    ConstraintId cid = 0;
    VarSerial var = 0;
    HistKey hist;
  };
  std::vector<Event> log_;
};

}  // namespace chrg
