#include <mpi.h>

#include <cstring>
#include <string>

#include "serinv/error.hpp"
#include "serinv/transport.hpp"

namespace serinv {

namespace {

// MPI guarantees tags up to 32767; collective tags are sequential, so the
// wrap-around never aliases two messages that are in flight together.
int mpi_tag(std::uint64_t tag) { return static_cast<int>(tag % 32767); }

void check(int rc, const char* what) {
    if (rc != MPI_SUCCESS) {
        throw Error(Errc::TransportFailure, std::string(what) + " failed with code " +
                                                std::to_string(rc));
    }
}

// [count, (rows, cols) * count] as uint64, then the values of every block.
std::vector<char> serialize(const std::vector<Block>& payload) {
    std::size_t values = 0;
    for (const auto& b : payload) values += b.size();
    const std::size_t header = 8 * (1 + 2 * payload.size());
    std::vector<char> buf(header + 8 * values);
    auto* head = reinterpret_cast<std::uint64_t*>(buf.data());
    head[0] = payload.size();
    char* out = buf.data() + header;
    for (std::size_t i = 0; i < payload.size(); ++i) {
        head[1 + 2 * i] = payload[i].rows();
        head[2 + 2 * i] = payload[i].cols();
        std::memcpy(out, payload[i].data(), 8 * payload[i].size());
        out += 8 * payload[i].size();
    }
    return buf;
}

std::vector<Block> deserialize(const std::vector<char>& buf) {
    if (buf.size() < 8) {
        throw Error(Errc::TransportFailure, "truncated message");
    }
    const auto* head = reinterpret_cast<const std::uint64_t*>(buf.data());
    const std::size_t count = head[0];
    const std::size_t header = 8 * (1 + 2 * count);
    if (buf.size() < header) {
        throw Error(Errc::TransportFailure, "truncated message header");
    }
    std::vector<Block> out;
    out.reserve(count);
    const char* in = buf.data() + header;
    for (std::size_t i = 0; i < count; ++i) {
        Block b(head[1 + 2 * i], head[2 + 2 * i]);
        if (in + 8 * b.size() > buf.data() + buf.size()) {
            throw Error(Errc::TransportFailure, "truncated message payload");
        }
        std::memcpy(b.data(), in, 8 * b.size());
        in += 8 * b.size();
        out.push_back(std::move(b));
    }
    return out;
}

class MpiCommunicator final : public Communicator {
  public:
    MpiCommunicator(MPI_Comm comm, bool owned) : comm_(comm), owned_(owned) {
        check(MPI_Comm_rank(comm_, &rank_), "MPI_Comm_rank");
        check(MPI_Comm_size(comm_, &size_), "MPI_Comm_size");
    }
    ~MpiCommunicator() override {
        if (owned_) MPI_Comm_free(&comm_);
    }
    MpiCommunicator(const MpiCommunicator&) = delete;
    MpiCommunicator& operator=(const MpiCommunicator&) = delete;

    int rank() const override { return rank_; }
    int size() const override { return size_; }

    void send(int dst, std::uint64_t tag, std::vector<Block> payload) override {
        auto buf = serialize(payload);
        check(MPI_Send(buf.data(), static_cast<int>(buf.size()), MPI_BYTE, dst, mpi_tag(tag), comm_),
              "MPI_Send");
    }

    std::vector<Block> recv(int src, std::uint64_t tag) override {
        MPI_Status status;
        check(MPI_Probe(src, mpi_tag(tag), comm_, &status), "MPI_Probe");
        int bytes = 0;
        check(MPI_Get_count(&status, MPI_BYTE, &bytes), "MPI_Get_count");
        std::vector<char> buf(static_cast<std::size_t>(bytes));
        check(MPI_Recv(buf.data(), bytes, MPI_BYTE, src, mpi_tag(tag), comm_, MPI_STATUS_IGNORE),
              "MPI_Recv");
        return deserialize(buf);
    }

    std::unique_ptr<Communicator> split(int count) override {
        MPI_Comm sub = MPI_COMM_NULL;
        const int color = rank_ < count ? 0 : MPI_UNDEFINED;
        check(MPI_Comm_split(comm_, color, rank_, &sub), "MPI_Comm_split");
        if (sub == MPI_COMM_NULL) {
            return nullptr;
        }
        return std::make_unique<MpiCommunicator>(sub, true);
    }

  private:
    MPI_Comm comm_;
    bool owned_;
    int rank_ = 0;
    int size_ = 1;
};

}  // namespace

MpiSession::MpiSession(int* argc, char*** argv) {
    int ready = 0;
    MPI_Initialized(&ready);
    if (!ready) check(MPI_Init(argc, argv), "MPI_Init");
    MPI_Comm_set_errhandler(MPI_COMM_WORLD, MPI_ERRORS_RETURN);
}

MpiSession::~MpiSession() {
    int done = 0;
    MPI_Finalized(&done);
    if (!done) MPI_Finalize();
}

std::unique_ptr<Communicator> MpiSession::world() const {
    return std::make_unique<MpiCommunicator>(MPI_COMM_WORLD, false);
}

}  // namespace serinv
