#include "dicke/io/cache.hpp"

#include "dicke/errors.hpp"
#include "dicke/log.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace dicke::io {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'E', 'S'};

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put(const double* data, std::size_t n) {
    const auto* p = reinterpret_cast<const char*>(data);
    bytes_.insert(bytes_.end(), p, p + n * sizeof(double));
  }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}
  template <typename T>
  T get() {
    T v;
    take(&v, sizeof(T));
    return v;
  }
  void get(double* out, std::size_t n) { take(out, n * sizeof(double)); }
  bool done() const { return pos_ == size_; }

 private:
  void take(void* out, std::size_t n) {
    if (size_ - pos_ < n) throw NumericalError("cache payload is truncated");
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(const std::vector<char>& bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::vector<char> encode(const EigenSolution& s) {
  Writer w;
  w.put(s.params.omega);
  w.put(s.params.omega0);
  w.put(s.params.gamma);
  w.put<std::int32_t>(s.params.two_j);
  w.put<std::int32_t>(static_cast<int>(s.basis.kind));
  w.put<std::int32_t>(s.basis.cutoff);
  w.put<std::int32_t>(static_cast<int>(s.basis.sector));
  w.put(s.epsilon_T);
  w.put<std::uint64_t>(s.size());
  w.put(s.energies.data(), s.size());
  for (Parity p : s.parity) w.put<std::int8_t>(static_cast<std::int8_t>(p));
  for (bool c : s.converged) w.put<std::uint8_t>(c ? 1 : 0);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(s.coefficients.rows()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(s.coefficients.cols()));
  w.put(s.coefficients.data(), static_cast<std::size_t>(s.coefficients.size()));
  return w.bytes();
}

EigenSolution decode(const std::vector<char>& bytes) {
  Reader r(bytes.data(), bytes.size());
  EigenSolution s;
  s.params.omega = r.get<double>();
  s.params.omega0 = r.get<double>();
  s.params.gamma = r.get<double>();
  s.params.two_j = r.get<std::int32_t>();
  s.basis.kind = static_cast<BasisKind>(r.get<std::int32_t>());
  s.basis.cutoff = r.get<std::int32_t>();
  s.basis.sector = static_cast<ParitySector>(r.get<std::int32_t>());
  s.epsilon_T = r.get<double>();
  const auto n = r.get<std::uint64_t>();
  s.energies.resize(n);
  r.get(s.energies.data(), n);
  for (std::uint64_t k = 0; k < n; ++k) s.parity.push_back(static_cast<Parity>(r.get<std::int8_t>()));
  for (std::uint64_t k = 0; k < n; ++k) s.converged.push_back(r.get<std::uint8_t>() != 0);
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  s.coefficients.resize(static_cast<long>(rows), static_cast<long>(cols));
  r.get(s.coefficients.data(), rows * cols);
  if (!r.done()) throw NumericalError("cache payload has trailing bytes");
  return s;
}

// Advisory lock on a sibling file, released on destruction.
class FileLock {
 public:
  FileLock(const std::filesystem::path& file, bool exclusive) {
    fd_ = ::open((file.string() + ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ >= 0) ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH);
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

std::string job_name(EigenJob job) { return job == EigenJob::Vectors ? "vectors" : "values"; }

}  // namespace

std::string cache_key(const ModelParams& p, const BasisSpec& b, EigenJob job, const ConvergenceTolerances& tol) {
  std::ostringstream s;
  s.precision(17);
  s << "omega=" << p.omega << ";omega0=" << p.omega0 << ";gamma=" << p.gamma << ";two_j=" << p.two_j
    << ";basis=" << to_string(b.kind) << ";cutoff=" << b.cutoff << ";sector=" << to_string(b.sector)
    << ";job=" << job_name(job) << ";tol_energy=" << tol.energy << ";tol_tail=" << tol.tail << ";v=" << kCacheVersion;
  return s.str();
}

void write_solution(const EigenSolution& sol, const std::string& key, const std::filesystem::path& file) {
  const std::vector<char> payload = encode(sol);
  const auto tmp = std::filesystem::path(file.string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw NumericalError("cannot write cache file " + tmp.string());
    out.write(kMagic, 4);
    const std::uint32_t version = kCacheVersion;
    const auto key_len = static_cast<std::uint32_t>(key.size());
    const auto size = static_cast<std::uint64_t>(payload.size());
    const std::uint32_t crc = checksum(payload);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&key_len), sizeof key_len);
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    out.write(reinterpret_cast<const char*>(&size), sizeof size);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.write(reinterpret_cast<const char*>(&crc), sizeof crc);
    if (!out) throw NumericalError("failed writing cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::optional<EigenSolution> read_solution(const std::filesystem::path& file, const std::string& key) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  const std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(raw.data(), raw.size());
  char magic[4];
  for (char& c : magic) c = r.get<char>();
  if (std::memcmp(magic, kMagic, 4) != 0) throw NumericalError("not a cache file");
  if (r.get<std::uint32_t>() != kCacheVersion) throw NumericalError("cache format version mismatch");
  const auto key_len = r.get<std::uint32_t>();
  if (key_len > raw.size()) throw NumericalError("cache key length is corrupt");
  std::string stored(key_len, '\0');
  for (char& c : stored) c = r.get<char>();
  if (stored != key) throw NumericalError("cache file belongs to another key");
  const auto size = r.get<std::uint64_t>();
  if (size > raw.size()) throw NumericalError("cache payload size is corrupt");
  std::vector<char> payload(size);
  for (char& c : payload) c = r.get<char>();
  if (r.get<std::uint32_t>() != checksum(payload)) throw NumericalError("cache checksum mismatch");
  if (!r.done()) throw NumericalError("cache file has trailing bytes");
  return decode(payload);
}

SolutionCache::SolutionCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path SolutionCache::file_for(const std::string& key) const {
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(key.data()), static_cast<uInt>(key.size()));
  char name[32];
  std::snprintf(name, sizeof name, "%08lx.eig", static_cast<unsigned long>(crc));
  return root_ / name;
}

EigenSolution SolutionCache::get(const ModelParams& params, const BasisSpec& basis, EigenJob job,
                                 const ConvergenceTolerances& tol, const std::function<EigenSolution()>& compute,
                                 bool* hit) const {
  if (hit) *hit = false;
  if (!enabled()) return compute();
  std::filesystem::create_directories(root_);

  auto try_read = [&](EigenJob j) -> std::optional<EigenSolution> {
    const std::string key = cache_key(params, basis, j, tol);
    const auto file = file_for(key);
    FileLock lock(file, false);
    try {
      return read_solution(file, key);
    } catch (const NumericalError& e) {
      log::warn("cache entry " + file.string() + " is unusable (" + e.what() + "); rebuilding");
      return std::nullopt;
    }
  };
  auto found = try_read(job);
  if (!found && job == EigenJob::ValuesOnly) {
    found = try_read(EigenJob::Vectors);
    if (found) found->coefficients.resize(0, 0);
  }
  if (found) {
    if (hit) *hit = true;
    return *found;
  }
  const std::string key = cache_key(params, basis, job, tol);
  const auto file = file_for(key);
  EigenSolution sol = compute();
  FileLock lock(file, true);
  write_solution(sol, key, file);
  return sol;
}

}  // namespace dicke::io
