#include "cmc/model_space.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "cmc/error.hpp"

namespace cmc {

std::vector<ModelId> models_of_size(int p, int j) {
  if (j < 0 || j > p) {
    throw UsageError("models_of_size: size " + std::to_string(j) +
                     " out of range for p=" + std::to_string(p));
  }
  std::vector<ModelId> out;
  if (j == 0) {
    out.push_back(ModelId::empty());
    return out;
  }
  // Gosper's hack walks same-popcount masks in ascending order.
  std::uint32_t mask = (1u << j) - 1u;
  std::uint32_t limit = 1u << p;
  while (mask < limit) {
    out.push_back(ModelId{mask});
    std::uint32_t c = mask & (~mask + 1u);
    std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return out;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CMC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for_indexed(int count, int threads,
                          const std::function<void(int)>& body) {
  int t = std::min(resolve_threads(threads), count);
  if (t <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

constexpr double kTieTolerance = 1e-10;

MLSet::Entry reduce_best(const Dataset& data, const std::vector<ModelId>& masks,
                         const SearchBudget& budget,
                         std::vector<std::string>* warnings) {
  std::vector<FitResult> fits(masks.size());
  std::vector<std::string> fit_errors(masks.size());
  parallel_for_indexed(static_cast<int>(masks.size()), budget.threads,
                       [&](int i) {
                         try {
                           fits[i] = fit_submodel(data, masks[i]);
                         } catch (const Error& e) {
                           fit_errors[i] = e.what();
                         }
                       });
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!fit_errors[i].empty()) {
      throw NumericError("fit failed for model mask " +
                         std::to_string(masks[i].mask) + ": " + fit_errors[i]);
    }
  }

  // Argmax with smallest-mask tie-break; serial scan keeps the reduction
  // schedule-independent.
  std::size_t best = 0;
  for (std::size_t i = 1; i < masks.size(); ++i) {
    if (fits[i].loglik > fits[best].loglik + kTieTolerance) {
      best = i;
    }
    // masks are scanned in ascending order, so ties keep the earlier one
  }
  const FitResult& fit = fits[best];
  if (!fit.converged && warnings) {
    warnings->push_back("best size-" + std::to_string(masks[best].size()) +
                        " model (mask " + std::to_string(masks[best].mask) +
                        ") did not converge");
  }
  return MLSet::Entry{masks[best], fit};
}

}  // namespace

MLSet::Entry best_of_size(const Dataset& data, int j,
                          const SearchBudget& budget) {
  if (data.p() > budget.exhaustive_limit) {
    throw UsageError("exhaustive search refused for p=" +
                     std::to_string(data.p()) + " > limit " +
                     std::to_string(budget.exhaustive_limit));
  }
  return reduce_best(data, models_of_size(data.p(), j), budget, nullptr);
}

MLSet ml_set(const Dataset& data, const SearchBudget& budget) {
  const int p = data.p();
  if (p > budget.exhaustive_limit) {
    throw UsageError("exhaustive search refused for p=" + std::to_string(p) +
                     " > limit " + std::to_string(budget.exhaustive_limit));
  }
  int k = budget.resolved_max_size(p);
  if (k >= data.n() - 1) {
    throw UsageError("max model size must satisfy k < n - 1");
  }
  MLSet set;
  for (int j = 0; j <= k; ++j) {
    set.entries.push_back(
        reduce_best(data, models_of_size(p, j), budget, &set.warnings));
  }
  return set;
}

}  // namespace cmc
