// Guest memory with per-word status tracking.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace isskit::sim {

enum class WordStatus : uint8_t { status_default, status_immutable, status_mutable };

std::string_view to_string(WordStatus s);

inline constexpr uint64_t kWordBytes = 8;
inline constexpr uint64_t kPageBytes = 4096;
inline constexpr uint64_t kConsolePort = 0x1000'0000;

inline uint64_t word_of(uint64_t addr) { return addr & ~(kWordBytes - 1); }

struct MemoryConfig {
  uint64_t size = uint64_t{1} << 32;
  bool track_status = true;
  // Byte writes here go to the console instead of memory; reads return 0.
  std::optional<uint64_t> console_port = kConsolePort;
};

struct FetchResult {
  uint64_t value = 0;
  bool was_immutable = false;
};

class SimMemory {
 public:
  // Receives the word address and every callback id registered on it. Runs
  // before the write changes any byte.
  using InvalidationHandler = std::function<void(uint64_t word, const std::vector<uint64_t>& ids)>;

  explicit SimMemory(MemoryConfig config = {});
  SimMemory(const SimMemory& other);
  SimMemory& operator=(const SimMemory& other);
  SimMemory(SimMemory&&) noexcept = default;
  SimMemory& operator=(SimMemory&&) noexcept = default;

  // nbytes is 1, 2, 4 or 8; little-endian. Out-of-range accesses throw
  // rt::ModelTrap.
  uint64_t read(uint64_t addr, unsigned nbytes) const;
  FetchResult fetch(uint64_t addr, unsigned nbytes);
  void write(uint64_t addr, unsigned nbytes, uint64_t value);

  void register_invalidation(uint64_t word_addr, uint64_t callback_id);
  void set_invalidation_handler(InvalidationHandler handler) { handler_ = std::move(handler); }
  WordStatus status_of(uint64_t word_addr) const;

  // Raw image loading: no status change, no callbacks.
  void load(uint64_t addr, std::span<const uint8_t> bytes);
  // Restore bytes without any status bookkeeping (used to roll back
  // speculative writes).
  void poke(uint64_t addr, unsigned nbytes, uint64_t value);

  const std::string& console() const { return console_; }
  void truncate_console(size_t n) {
    if (n < console_.size()) console_.resize(n);
  }
  uint64_t size() const { return config_.size; }
  bool tracking() const { return config_.track_status; }
  const MemoryConfig& config() const { return config_; }

  bool same_contents(const SimMemory& other, std::string* why = nullptr) const;
  uint64_t content_digest() const;
  size_t pages_touched() const { return pages_.size(); }

 private:
  struct Page {
    uint8_t bytes[kPageBytes] = {};
    WordStatus status[kPageBytes / kWordBytes] = {};
  };

  void check_range(uint64_t addr, unsigned nbytes) const;
  const Page* find_page(uint64_t page) const;
  Page& page_for(uint64_t page);
  bool is_console(uint64_t addr) const {
    return config_.console_port && addr == *config_.console_port;
  }
  void store_bytes(uint64_t addr, unsigned nbytes, uint64_t value);

  MemoryConfig config_;
  std::unordered_map<uint64_t, std::unique_ptr<Page>> pages_;
  std::unordered_map<uint64_t, std::vector<uint64_t>> callbacks_;
  InvalidationHandler handler_;
  std::string console_;
  mutable uint64_t cached_index_ = ~uint64_t{0};
  mutable Page* cached_page_ = nullptr;
};

}  // namespace isskit::sim
