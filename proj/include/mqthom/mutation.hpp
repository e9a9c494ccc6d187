#pragma once

// Fault-injection switches used by the mutation-sensitivity tests. Each flag
// corrupts exactly one sign rule of the engine on the current thread.

namespace mqthom {

enum class Mutation {
  none,
  berezin_parity,   // flip the reordering sign in fiber integration
  wick_sigma_sign,  // drop (-1)^sigma for 1-form valued Wick rows
  split_sign,       // treat every (I, I') shuffle as even
};

namespace detail {
inline thread_local Mutation active_mutation = Mutation::none;
}

inline Mutation current_mutation() { return detail::active_mutation; }

class ScopedMutation {
 public:
  explicit ScopedMutation(Mutation m) : previous_(detail::active_mutation) {
    detail::active_mutation = m;
  }
  ~ScopedMutation() { detail::active_mutation = previous_; }
  ScopedMutation(const ScopedMutation&) = delete;
  ScopedMutation& operator=(const ScopedMutation&) = delete;

 private:
  Mutation previous_;
};

}  // namespace mqthom
