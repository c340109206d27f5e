#include "aiot/metrics.hpp"

#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

namespace aiot {
namespace {

using Clock = std::chrono::steady_clock;

std::optional<double> process_cpu_seconds() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  const auto seconds = [](const timeval& tv) { return static_cast<double>(tv.tv_sec) + tv.tv_usec * 1e-6; };
  return seconds(usage.ru_utime) + seconds(usage.ru_stime);
}

std::optional<double> peak_rss_mb() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return static_cast<double>(usage.ru_maxrss) / 1024.0;  // kilobytes on Linux
}

std::optional<double> current_rss_mb() {
  std::ifstream statm("/proc/self/statm");
  long pages_total = 0;
  long pages_resident = 0;
  if (!(statm >> pages_total >> pages_resident)) return std::nullopt;
  return static_cast<double>(pages_resident) * static_cast<double>(sysconf(_SC_PAGESIZE)) / (1024.0 * 1024.0);
}

}  // namespace

CompressionRatio compression_ratio(std::uint64_t original_bytes, std::uint64_t compressed_bytes) {
  if (compressed_bytes == 0) throw Error(ErrorCode::ZeroCompressedSize, "compressed size is zero");
  const auto g = std::gcd(original_bytes, compressed_bytes);
  CompressionRatio r;
  r.numerator = original_bytes / g;
  r.denominator = compressed_bytes / g;
  r.rounded = (2 * original_bytes + compressed_bytes) / (2 * compressed_bytes);
  return r;
}

struct ResourceSampler::Impl {
  std::chrono::milliseconds cadence;
  std::mutex mutex;
  std::condition_variable wake;
  bool stopping = false;
  std::thread worker;
  std::vector<ResourceSample> samples;  // guarded by mutex
  Clock::time_point start_time;
  double start_cpu = 0.0;
  double start_rss = 0.0;
  double start_peak = 0.0;

  void record() {
    ResourceSample s;
    s.elapsed_s = std::chrono::duration<double>(Clock::now() - start_time).count();
    s.cpu_s = process_cpu_seconds().value_or(0.0);
    s.rss_mb = current_rss_mb().value_or(0.0);
    std::lock_guard lock(mutex);
    samples.push_back(s);
  }
};

ResourceSampler::ResourceSampler(std::chrono::milliseconds cadence) : impl_(std::make_unique<Impl>()) {
  impl_->cadence = cadence;
}

ResourceSampler::~ResourceSampler() {
  if (impl_->worker.joinable()) stop();
}

bool ResourceSampler::supported() { return process_cpu_seconds() && current_rss_mb() && peak_rss_mb(); }

void ResourceSampler::start() {
  impl_->samples.clear();
  impl_->stopping = false;
  impl_->start_time = Clock::now();
  impl_->start_cpu = process_cpu_seconds().value_or(0.0);
  impl_->start_rss = current_rss_mb().value_or(0.0);
  impl_->start_peak = peak_rss_mb().value_or(0.0);
  impl_->record();
  impl_->worker = std::thread([impl = impl_.get()] {
    std::unique_lock lock(impl->mutex);
    while (!impl->wake.wait_for(lock, impl->cadence, [impl] { return impl->stopping; })) {
      lock.unlock();
      impl->record();
      lock.lock();
    }
  });
}

ResourceUsage ResourceSampler::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
  }
  impl_->wake.notify_all();
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->record();

  ResourceUsage usage;
  usage.samples = impl_->samples;
  if (!supported()) return usage;

  const auto& last = usage.samples.back();
  if (last.elapsed_s > 0.0) usage.cpu_percent = (last.cpu_s - impl_->start_cpu) / last.elapsed_s * 100.0;
  double peak = std::max(0.0, peak_rss_mb().value_or(0.0) - impl_->start_peak);
  for (const auto& s : usage.samples) peak = std::max(peak, s.rss_mb - impl_->start_rss);
  usage.mem_mb = peak;
  return usage;
}

}  // namespace aiot
