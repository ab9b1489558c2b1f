#include "chrg/store.hpp"

#include "chrg/term_io.hpp"

namespace chrg {

void Bindings::bind(VarSerial v, const Term& value, Trail& trail) {
  auto [it, inserted] = map_.emplace(v, value);
  if (!inserted) throw EngineError("rebinding an already bound variable");
  (void)it;
  trail.push_bind(v);
}

const Term* Bindings::lookup(VarSerial v) const {
  auto it = map_.find(v);
  return it == map_.end() ? nullptr : &it->second;
}

Term Bindings::walk(const Term& t) const {
  Term cur = t;
  while (cur.is_var()) {
    const Term* b = lookup(cur.var_serial());
    if (!b) return cur;
    cur = *b;
  }
  return cur;
}

Term Bindings::resolve(const Term& t) const {
  Term w = walk(t);
  if (!w.is_compound()) return w;
  std::vector<Term> args;
  args.reserve(w.arity());
  bool changed = false;
  for (const Term& a : w.args()) {
    args.push_back(resolve(a));
    if (!(args.back() == a)) changed = true;
  }
  if (!changed) return w;
  return Term::compound(w.functor(), std::move(args));
}

void PropagationHistory::record(const HistKey& k, Trail& trail) {
  if (!set_.insert(k).second) throw EngineError("duplicate history record");
  trail.push_hist(k);
}

ConstraintId Store::insert(SymId functor, std::vector<Term> args, Trail& trail,
                           bool allow_vars) {
  if (!allow_vars) {
    for (const Term& a : args) {
      if (!a.ground()) {
        throw EngineError("non-ground argument in constraint " +
                          symbol_table::name(functor) + "/" +
                          std::to_string(args.size()));
      }
    }
  }
  ConstraintId id = next_id_++;
  Constraint c;
  c.id = id;
  c.functor = functor;
  c.args = std::move(args);
  records_.push_back(std::move(c));
  const Constraint& rec = records_.back();
  std::uint64_t fk = functor_key(functor, rec.arity());
  index_[fk].push_back(id);
  for (std::size_t k = 0; k < rec.args.size(); ++k) {
    if (rec.args[k].is_int())
      arg_index_[ArgKey{fk, k, rec.args[k].int_value()}].push_back(id);
    else
      ++loose_[loose_key(fk, k)];
  }
  ++live_;
  trail.push_insert(id);
  return id;
}

void Store::kill(ConstraintId id, Trail& trail) {
  if (!alive(id)) throw EngineError("killing a dead or unknown constraint");
  records_[id - 1].alive = false;
  --live_;
  trail.push_kill(id);
}

bool Store::alive(ConstraintId id) const {
  return id >= 1 && id < next_id_ && records_[id - 1].alive;
}

const Constraint& Store::get(ConstraintId id) const {
  if (id < 1 || id >= next_id_) throw EngineError("unknown constraint id");
  return records_[id - 1];
}

const std::vector<ConstraintId>& Store::candidates(SymId functor,
                                                   std::size_t arity) const {
  static const std::vector<ConstraintId> empty;
  auto it = index_.find(functor_key(functor, arity));
  return it == index_.end() ? empty : it->second;
}

const std::vector<ConstraintId>* Store::indexed_candidates(
    SymId functor, std::size_t arity, std::size_t pos, std::int64_t val) const {
  static const std::vector<ConstraintId> empty;
  std::uint64_t fk = functor_key(functor, arity);
  auto lit = loose_.find(loose_key(fk, pos));
  if (lit != loose_.end() && lit->second != 0) return nullptr;
  auto it = arg_index_.find(ArgKey{fk, pos, val});
  return it == arg_index_.end() ? &empty : &it->second;
}

std::string Store::dump(const Bindings& b) const {
  std::string out;
  for (const Constraint& c : records_) {
    if (!c.alive) continue;
    out += print_term(b.resolve(c.as_term()));
    out += '\n';
  }
  return out;
}

void Trail::push_insert(ConstraintId id) {
  Event e;
  e.tag = Tag::Insert;
  e.cid = id;
  log_.push_back(std::move(e));
}

void Trail::push_kill(ConstraintId id) {
  Event e;
  e.tag = Tag::Kill;
  e.cid = id;
  log_.push_back(std::move(e));
}

void Trail::push_hist(const HistKey& k) {
  Event e;
  e.tag = Tag::HistRec;
  e.hist = k;
  log_.push_back(std::move(e));
}

void Trail::push_bind(VarSerial v) {
  Event e;
  e.tag = Tag::Bind;
  e.var = v;
  log_.push_back(std::move(e));
}

void Trail::undo_to(Mark m, Store& store, PropagationHistory& history,
                    Bindings& bindings) {
  while (log_.size() > m) {
    const Event& e = log_.back();
    switch (e.tag) {
      case Tag::Insert: {
        // Inserts are undone in LIFO order, so this is always the newest id.
        Constraint& c = store.records_.back();
        if (c.id != e.cid) throw EngineError("trail order violated on insert undo");
        std::uint64_t fk = functor_key(c.functor, c.arity());
        store.index_[fk].pop_back();
        for (std::size_t k = 0; k < c.args.size(); ++k) {
          if (c.args[k].is_int())
            store.arg_index_[Store::ArgKey{fk, k, c.args[k].int_value()}].pop_back();
          else
            --store.loose_[Store::loose_key(fk, k)];
        }
        if (c.alive) --store.live_;
        store.records_.pop_back();
        --store.next_id_;
        break;
      }
      case Tag::Kill:
        store.records_[e.cid - 1].alive = true;
        ++store.live_;
        break;
      case Tag::HistRec:
        history.set_.erase(e.hist);
        break;
      case Tag::Bind:
        bindings.map_.erase(e.var);
        break;
    }
    log_.pop_back();
  }
}

}  // namespace chrg
