#include "isskit/sim/memory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstring>

#include "isskit/rt/value.hpp"

namespace isskit::sim {

std::string_view to_string(WordStatus s) {
  switch (s) {
    case WordStatus::status_default: return "status_default";
    case WordStatus::status_immutable: return "status_immutable";
    case WordStatus::status_mutable: return "status_mutable";
  }
  return "?";
}

SimMemory::SimMemory(MemoryConfig config) : config_(config) {}

SimMemory::SimMemory(const SimMemory& other)
    : config_(other.config_), callbacks_(other.callbacks_), handler_(other.handler_), console_(other.console_) {
  for (auto& [k, p] : other.pages_) pages_.emplace(k, std::make_unique<Page>(*p));
}

SimMemory& SimMemory::operator=(const SimMemory& other) {
  if (this != &other) {
    SimMemory copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void SimMemory::check_range(uint64_t addr, unsigned nbytes) const {
  if (nbytes != 1 && nbytes != 2 && nbytes != 4 && nbytes != 8)
    throw rt::ModelTrap(fmt::format("invalid access size {}", nbytes));
  if (addr > config_.size || nbytes > config_.size - addr)
    throw rt::ModelTrap(fmt::format("memory access out of bounds at {:#x}", addr));
}

const SimMemory::Page* SimMemory::find_page(uint64_t page) const {
  if (page == cached_index_) return cached_page_;
  auto it = pages_.find(page);
  if (it == pages_.end()) return nullptr;
  cached_index_ = page;
  cached_page_ = it->second.get();
  return cached_page_;
}

SimMemory::Page& SimMemory::page_for(uint64_t page) {
  if (page == cached_index_) return *cached_page_;
  auto& slot = pages_[page];
  if (!slot) slot = std::make_unique<Page>();
  cached_index_ = page;
  cached_page_ = slot.get();
  return *slot;
}

uint64_t SimMemory::read(uint64_t addr, unsigned nbytes) const {
  check_range(addr, nbytes);
  if (is_console(addr)) return 0;
  uint64_t page = addr / kPageBytes, off = addr % kPageBytes;
  if (off + nbytes <= kPageBytes) {
    const Page* p = find_page(page);
    if (!p) return 0;
    uint64_t v = 0;
    for (unsigned i = nbytes; i-- > 0;) v = (v << 8) | p->bytes[off + i];
    return v;
  }
  uint64_t v = 0;
  for (unsigned i = nbytes; i-- > 0;) {
    uint64_t a = addr + i;
    const Page* p = find_page(a / kPageBytes);
    v = (v << 8) | (p ? p->bytes[a % kPageBytes] : 0);
  }
  return v;
}

FetchResult SimMemory::fetch(uint64_t addr, unsigned nbytes) {
  FetchResult r;
  r.value = read(addr, nbytes);
  if (!config_.track_status) return r;
  r.was_immutable = true;
  for (uint64_t w = word_of(addr); w < addr + nbytes; w += kWordBytes) {
    Page& p = page_for(w / kPageBytes);
    WordStatus& s = p.status[(w % kPageBytes) / kWordBytes];
    if (s == WordStatus::status_default) s = WordStatus::status_immutable;
    if (s != WordStatus::status_immutable) r.was_immutable = false;
  }
  return r;
}

void SimMemory::store_bytes(uint64_t addr, unsigned nbytes, uint64_t value) {
  for (unsigned i = 0; i < nbytes; ++i) {
    uint64_t a = addr + i;
    page_for(a / kPageBytes).bytes[a % kPageBytes] = static_cast<uint8_t>(value >> (8 * i));
  }
}

void SimMemory::write(uint64_t addr, unsigned nbytes, uint64_t value) {
  check_range(addr, nbytes);
  if (is_console(addr)) {
    console_ += static_cast<char>(value & 0xff);
    return;
  }
  if (config_.track_status) {
    for (uint64_t w = word_of(addr); w < addr + nbytes; w += kWordBytes) {
      const Page* p = find_page(w / kPageBytes);
      if (!p || p->status[(w % kPageBytes) / kWordBytes] != WordStatus::status_immutable) continue;
      auto it = callbacks_.find(w);
      if (it != callbacks_.end()) {
        std::vector<uint64_t> ids = std::move(it->second);
        callbacks_.erase(it);
        if (handler_) handler_(w, ids);
      }
      page_for(w / kPageBytes).status[(w % kPageBytes) / kWordBytes] = WordStatus::status_mutable;
    }
  }
  store_bytes(addr, nbytes, value);
}

void SimMemory::poke(uint64_t addr, unsigned nbytes, uint64_t value) {
  check_range(addr, nbytes);
  if (is_console(addr)) return;
  store_bytes(addr, nbytes, value);
}

void SimMemory::register_invalidation(uint64_t word_addr, uint64_t callback_id) {
  auto& ids = callbacks_[word_of(word_addr)];
  if (std::find(ids.begin(), ids.end(), callback_id) == ids.end()) ids.push_back(callback_id);
}

WordStatus SimMemory::status_of(uint64_t word_addr) const {
  uint64_t w = word_of(word_addr);
  const Page* p = find_page(w / kPageBytes);
  return p ? p->status[(w % kPageBytes) / kWordBytes] : WordStatus::status_default;
}

void SimMemory::load(uint64_t addr, std::span<const uint8_t> bytes) {
  if (addr > config_.size || bytes.size() > config_.size - addr)
    throw rt::ModelTrap(fmt::format("image of {} bytes at {:#x} does not fit memory", bytes.size(), addr));
  for (size_t i = 0; i < bytes.size(); ++i) {
    uint64_t a = addr + i;
    page_for(a / kPageBytes).bytes[a % kPageBytes] = bytes[i];
  }
}

namespace {

bool all_zero(const uint8_t* p, size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (p[i]) return false;
  return true;
}

}  // namespace

bool SimMemory::same_contents(const SimMemory& other, std::string* why) const {
  if (console_ != other.console_) {
    if (why) *why = "console output differs";
    return false;
  }
  auto check = [&](const SimMemory& a, const SimMemory& b) {
    for (auto& [k, p] : a.pages_) {
      const Page* q = b.find_page(k);
      bool same = q ? std::memcmp(p->bytes, q->bytes, kPageBytes) == 0 : all_zero(p->bytes, kPageBytes);
      if (!same) {
        if (why) {
          for (size_t i = 0; i < kPageBytes; ++i) {
            uint8_t x = p->bytes[i], y = q ? q->bytes[i] : 0;
            if (x != y) {
              *why = fmt::format("memory differs at {:#x}", k * kPageBytes + i);
              break;
            }
          }
        }
        return false;
      }
    }
    return true;
  };
  return check(*this, other) && check(other, *this);
}

uint64_t SimMemory::content_digest() const {
  std::vector<uint64_t> keys;
  for (auto& [k, p] : pages_)
    if (!all_zero(p->bytes, kPageBytes)) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](uint8_t b) { h = (h ^ b) * 1099511628211ull; };
  for (uint64_t k : keys) {
    for (int i = 0; i < 8; ++i) mix(static_cast<uint8_t>(k >> (8 * i)));
    for (uint8_t b : pages_.at(k)->bytes) mix(b);
  }
  for (char c : console_) mix(static_cast<uint8_t>(c));
  return h;
}

}  // namespace isskit::sim
