#pragma once

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

namespace cbq {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kUnlimitedBudget = std::numeric_limits<std::uint64_t>::max();

struct Footprint {
    std::uint64_t resident_bytes = 0;
    std::uint64_t spilled_live_bytes = 0;
    std::uint64_t peak_bytes = 0;
};

/// Budgeted two-level map from block id to compressed payload. Payloads stay
/// in memory while resident_bytes fits the budget; an incoming payload that
/// would not fit is appended to a per-run spill file instead (resident
/// payloads are never evicted). put_shared maps many ids to one payload,
/// counted once. Replaced spill extents become dead file space; the file is
/// append-only and removed when the store is destroyed.
///
/// Thread safety: index and counters are mutex-protected; spill extents are
/// append-only, so file I/O runs outside the lock via pread/pwrite. Per-id
/// put/get ordering is the caller's responsibility (the engine's stage
/// barrier provides it).
class BlockStore {
public:
    explicit BlockStore(std::uint64_t budget_bytes = kUnlimitedBudget,
                        std::filesystem::path spill_dir = std::filesystem::temp_directory_path())
        : budget_(budget_bytes), spill_dir_(std::move(spill_dir)) {}

    BlockStore(const BlockStore&) = delete;
    BlockStore& operator=(const BlockStore&) = delete;

    ~BlockStore() {
        if (spill_fd_ >= 0) {
            ::close(spill_fd_);
            std::error_code ec;
            std::filesystem::remove(spill_path_, ec);
        }
    }

    void put(std::uint64_t id, std::vector<std::uint8_t> payload) {
        const std::uint64_t size = payload.size();
        std::uint64_t offset;
        {
            std::lock_guard lock(mutex_);
            detach_locked(id);
            if (fits_locked(size)) {
                attach_memory_locked(
                    id, std::make_shared<const std::vector<std::uint8_t>>(std::move(payload)));
                finish_put_locked();
                return;
            }
            offset = reserve_extent_locked(size);
        }
        write_spill(offset, payload);
        std::lock_guard lock(mutex_);
        attach_spill_locked(id, std::make_shared<const Extent>(Extent{offset, size}));
        ++spilled_blocks_;
        finish_put_locked();
    }

    void put_shared(std::span<const std::uint64_t> ids, std::vector<std::uint8_t> payload) {
        if (ids.empty()) {
            throw StoreError("put_shared requires at least one block id");
        }
        const std::uint64_t size = payload.size();
        std::uint64_t offset;
        {
            std::lock_guard lock(mutex_);
            for (std::uint64_t id : ids) {
                detach_locked(id);
            }
            if (fits_locked(size)) {
                auto shared =
                    std::make_shared<const std::vector<std::uint8_t>>(std::move(payload));
                for (std::uint64_t id : ids) {
                    detach_locked(id);    // ids may repeat
                    attach_memory_locked(id, shared);
                }
                finish_put_locked();
                return;
            }
            offset = reserve_extent_locked(size);
        }
        write_spill(offset, payload);
        std::lock_guard lock(mutex_);
        auto extent = std::make_shared<const Extent>(Extent{offset, size});
        for (std::uint64_t id : ids) {
            detach_locked(id);
            attach_spill_locked(id, extent);
        }
        ++spilled_blocks_;
        finish_put_locked();
    }

    /// Exact bytes last put for id, regardless of residency.
    std::vector<std::uint8_t> get(std::uint64_t id) const {
        Extent extent;
        {
            std::lock_guard lock(mutex_);
            const auto it = index_.find(id);
            if (it == index_.end()) {
                throw StoreError("unknown block id " + std::to_string(id));
            }
            if (const auto* mem = std::get_if<MemoryResidency>(&it->second)) {
                return *mem->payload;
            }
            extent = *std::get<SpillResidency>(it->second).extent;
        }
        std::vector<std::uint8_t> out(extent.length);
        read_spill(extent, out.data());
        return out;
    }

    bool contains(std::uint64_t id) const {
        std::lock_guard lock(mutex_);
        return index_.count(id) > 0;
    }

    bool is_spilled(std::uint64_t id) const {
        std::lock_guard lock(mutex_);
        const auto it = index_.find(id);
        return it != index_.end() && std::holds_alternative<SpillResidency>(it->second);
    }

    std::size_t block_count() const {
        std::lock_guard lock(mutex_);
        return index_.size();
    }

    /// Number of distinct in-memory payload objects (shared payloads count once).
    std::size_t resident_payload_count() const {
        std::lock_guard lock(mutex_);
        return mem_refs_.size();
    }

    Footprint footprint() const {
        std::lock_guard lock(mutex_);
        return Footprint{resident_bytes_, spilled_live_bytes_, peak_bytes_};
    }

    std::uint64_t spilled_block_count() const {
        std::lock_guard lock(mutex_);
        return spilled_blocks_;
    }

    std::uint64_t put_count() const {
        std::lock_guard lock(mutex_);
        return put_count_;
    }

private:
    struct Extent {
        std::uint64_t offset = 0;
        std::uint64_t length = 0;
    };
    struct MemoryResidency {
        std::shared_ptr<const std::vector<std::uint8_t>> payload;
    };
    struct SpillResidency {
        std::shared_ptr<const Extent> extent;
    };
    using Residency = std::variant<MemoryResidency, SpillResidency>;

    bool fits_locked(std::uint64_t size) const {
        return size <= budget_ && resident_bytes_ <= budget_ - size;
    }

    void detach_locked(std::uint64_t id) {
        const auto it = index_.find(id);
        if (it == index_.end()) {
            return;
        }
        if (const auto* mem = std::get_if<MemoryResidency>(&it->second)) {
            const auto ref = mem_refs_.find(mem->payload.get());
            if (--ref->second == 0) {
                resident_bytes_ -= mem->payload->size();
                mem_refs_.erase(ref);
            }
        } else {
            const auto& sp = std::get<SpillResidency>(it->second);
            const auto ref = spill_refs_.find(sp.extent.get());
            if (--ref->second == 0) {
                spilled_live_bytes_ -= sp.extent->length;
                spill_refs_.erase(ref);
            }
        }
        index_.erase(it);
    }

    void attach_memory_locked(std::uint64_t id,
                              std::shared_ptr<const std::vector<std::uint8_t>> payload) {
        if (mem_refs_[payload.get()]++ == 0) {
            resident_bytes_ += payload->size();
        }
        index_.insert_or_assign(id, MemoryResidency{std::move(payload)});
    }

    void attach_spill_locked(std::uint64_t id, std::shared_ptr<const Extent> extent) {
        if (spill_refs_[extent.get()]++ == 0) {
            spilled_live_bytes_ += extent->length;
        }
        index_.insert_or_assign(id, SpillResidency{std::move(extent)});
    }

    void finish_put_locked() {
        ++put_count_;
        peak_bytes_ = std::max(peak_bytes_, resident_bytes_ + spilled_live_bytes_);
    }

    std::uint64_t reserve_extent_locked(std::uint64_t size) {
        ensure_spill_file_locked();
        const std::uint64_t offset = spill_cursor_;
        spill_cursor_ += size;
        return offset;
    }

    void write_spill(std::uint64_t offset, const std::vector<std::uint8_t>& payload) {
        std::size_t written = 0;
        while (written < payload.size()) {
            const ssize_t rc = ::pwrite(spill_fd_, payload.data() + written,
                                        payload.size() - written,
                                        static_cast<off_t>(offset + written));
            if (rc < 0) {
                throw StoreError("spill write failed: " + std::string(std::strerror(errno)));
            }
            written += static_cast<std::size_t>(rc);
        }
    }

    void read_spill(const Extent& extent, std::uint8_t* out) const {
        std::size_t done = 0;
        while (done < extent.length) {
            const ssize_t rc = ::pread(spill_fd_, out + done, extent.length - done,
                                       static_cast<off_t>(extent.offset + done));
            if (rc < 0) {
                throw StoreError("spill read failed: " + std::string(std::strerror(errno)));
            }
            if (rc == 0) {
                throw StoreError("spill read hit end of file");
            }
            done += static_cast<std::size_t>(rc);
        }
    }

    void ensure_spill_file_locked() {
        if (spill_fd_ >= 0) {
            return;
        }
        std::error_code ec;
        std::filesystem::create_directories(spill_dir_, ec);
        static std::atomic<std::uint64_t> counter{0};
        spill_path_ = spill_dir_ / ("cbq-spill-" + std::to_string(::getpid()) + "-" +
                                    std::to_string(counter.fetch_add(1)) + ".bin");
        spill_fd_ = ::open(spill_path_.c_str(), O_RDWR | O_CREAT | O_EXCL, 0600);
        if (spill_fd_ < 0) {
            throw StoreError("cannot create spill file " + spill_path_.string() + ": " +
                             std::string(std::strerror(errno)));
        }
    }

    std::uint64_t budget_;
    std::filesystem::path spill_dir_;
    std::filesystem::path spill_path_;
    int spill_fd_ = -1;

    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, Residency> index_;
    std::unordered_map<const void*, std::uint64_t> mem_refs_;
    std::unordered_map<const void*, std::uint64_t> spill_refs_;
    std::uint64_t resident_bytes_ = 0;
    std::uint64_t spilled_live_bytes_ = 0;
    std::uint64_t peak_bytes_ = 0;
    std::uint64_t spilled_blocks_ = 0;
    std::uint64_t spill_cursor_ = 0;
    std::uint64_t put_count_ = 0;
};

} // namespace cbq
