#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "serinv/error.hpp"
#include "serinv/transport.hpp"

namespace serinv {

namespace {

struct Message {
    std::uint64_t group;
    std::uint64_t tag;
    std::vector<Block> payload;
};

struct Channel {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<Message> queue;
};

class World {
  public:
    World(int size, TransportConfig config)
        : size_(size), config_(config), channels_(static_cast<std::size_t>(size * size)) {
        for (auto& c : channels_) c = std::make_unique<Channel>();
    }

    void send(int src, int dst, Message msg) {
        Channel& ch = channel(src, dst);
        std::unique_lock lock(ch.mutex);
        bool ok = ch.cv.wait_for(lock, config_.timeout, [&] {
            return aborted_.load() || ch.queue.size() < config_.channel_capacity;
        });
        if (aborted_.load()) {
            throw Error(Errc::TransportFailure, "peer rank failed");
        }
        if (!ok) {
            throw Error(Errc::TransportFailure, "send from rank " + std::to_string(src) +
                                                    " to rank " + std::to_string(dst) +
                                                    " timed out");
        }
        ch.queue.push_back(std::move(msg));
        ch.cv.notify_all();
    }

    std::vector<Block> recv(int src, int dst, std::uint64_t group, std::uint64_t tag) {
        Channel& ch = channel(src, dst);
        std::unique_lock lock(ch.mutex);
        std::deque<Message>::iterator hit;
        auto ready = [&] {
            if (aborted_.load()) return true;
            for (hit = ch.queue.begin(); hit != ch.queue.end(); ++hit) {
                if (hit->group == group && hit->tag == tag) return true;
            }
            return false;
        };
        bool ok = ch.cv.wait_for(lock, config_.timeout, ready);
        if (aborted_.load()) {
            throw Error(Errc::TransportFailure, "peer rank failed");
        }
        if (!ok) {
            throw Error(Errc::TransportFailure, "receive on rank " + std::to_string(dst) +
                                                    " from rank " + std::to_string(src) +
                                                    " timed out");
        }
        std::vector<Block> payload = std::move(hit->payload);
        ch.queue.erase(hit);
        ch.cv.notify_all();
        return payload;
    }

    void abort() {
        aborted_.store(true);
        for (auto& c : channels_) {
            std::lock_guard lock(c->mutex);
            c->cv.notify_all();
        }
    }

    int size() const { return size_; }

  private:
    Channel& channel(int src, int dst) {
        return *channels_[static_cast<std::size_t>(src * size_ + dst)];
    }

    int size_;
    TransportConfig config_;
    std::vector<std::unique_ptr<Channel>> channels_;
    std::atomic<bool> aborted_{false};
};

class InProcessCommunicator : public Communicator {
  public:
    InProcessCommunicator(World& world, int rank, int size, std::uint64_t group)
        : world_(world), rank_(rank), size_(size), group_(group) {}

    int rank() const override { return rank_; }
    int size() const override { return size_; }

    void send(int dst, std::uint64_t tag, std::vector<Block> payload) override {
        check_peer(dst);
        world_.send(rank_, dst, Message{group_, tag, std::move(payload)});
    }

    std::vector<Block> recv(int src, std::uint64_t tag) override {
        check_peer(src);
        return world_.recv(src, rank_, group_, tag);
    }

    std::unique_ptr<Communicator> split(int count) override {
        const auto seq = next_tag();
        if (count < 1 || count > size_) {
            throw Error(Errc::InfeasibleParameters, "split size out of range");
        }
        if (rank_ >= count) {
            return nullptr;
        }
        // Subgroups share the world's channels; rank numbers are unchanged, so
        // only the group id has to differ.
        const std::uint64_t child = group_ * 0x100000001b3ULL + seq;
        return std::make_unique<InProcessCommunicator>(world_, rank_, count, child);
    }

  private:
    void check_peer(int peer) const {
        if (peer < 0 || peer >= size_ || peer == rank_) {
            throw Error(Errc::TransportFailure, "invalid peer rank " + std::to_string(peer));
        }
    }

    World& world_;
    int rank_;
    int size_;
    std::uint64_t group_;
};

}  // namespace

void run_in_process(int size, const std::function<void(Communicator&)>& body,
                    const TransportConfig& config) {
    if (size < 1) {
        throw Error(Errc::InfeasibleParameters, "need at least one rank");
    }
    World world(size, config);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(size));
    std::vector<bool> transport_only(static_cast<std::size_t>(size), false);
    {
        std::vector<std::jthread> ranks;
        ranks.reserve(static_cast<std::size_t>(size));
        for (int r = 0; r < size; ++r) {
            ranks.emplace_back([&, r] {
                auto slot = static_cast<std::size_t>(r);
                try {
                    InProcessCommunicator comm(world, r, size, 1);
                    body(comm);
                } catch (const Error& e) {
                    errors[slot] = std::current_exception();
                    transport_only[slot] = e.code() == Errc::TransportFailure;
                    world.abort();
                } catch (...) {
                    errors[slot] = std::current_exception();
                    world.abort();
                }
            });
        }
    }
    // Prefer the failure that caused the abort over the ones it induced.
    for (std::size_t r = 0; r < errors.size(); ++r) {
        if (errors[r] && !transport_only[r]) std::rethrow_exception(errors[r]);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace serinv
