#include "rendezvous/kernels.hpp"

#include <atomic>

namespace rendezvous::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops* pick(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) return &avx2_ops;
#endif
  (void)b;
  return &scalar_ops;
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* init() {
  const Ops* ops = pick(cpu_has_avx2() ? Backend::avx2 : Backend::scalar);
  const Ops* expected = nullptr;
  g_active.compare_exchange_strong(expected, ops);
  return g_active.load();
}

}  // namespace

bool available(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2();
}

Backend best_available() {
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

const Ops& active() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  return ops ? *ops : *init();
}

Backend active_backend() {
  return &active() == &scalar_ops ? Backend::scalar : Backend::avx2;
}

bool select(Backend b) {
  if (!available(b)) return false;
  g_active.store(pick(b), std::memory_order_release);
  return true;
}

}  // namespace rendezvous::kernels
