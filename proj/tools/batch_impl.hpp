#pragma once

#include <algorithm>
#include <atomic>
#include <thread>

namespace sdpack::cli {

template <class F>
Outcome batch(const std::vector<std::string>& paths, int jobs, F&& one) {
  if (paths.size() == 1) return one(paths.front());
  std::vector<Outcome> results(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) results[i] = one(paths[i]);
  };
  const std::size_t nthreads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), 1, paths.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  Outcome all;
  all.report = json::array();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    all.code = std::max(all.code, results[i].code);
    all.report.push_back({{"file", paths[i]}, {"exit_code", results[i].code}, {"report", results[i].report}});
  }
  return all;
}

}  // namespace sdpack::cli
