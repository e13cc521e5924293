/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 olrw contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <array>
#include <functional>

#include "olrw/common/bytes.hpp"
#include "olrw/fronthaul/section.hpp"

namespace olrw::fronthaul::detail {

// Attribute indices in table order.
enum Attr : std::size_t {
    kISample = 0,
    kQSample,
    kDemodInfo,
    kUlSnr,
    kBattery,
    kUlFreqHopping,
    kTimestamp,
    kUlRssi,
    kUlUtilization,
    kPowerSource,
    kTimingAdvance,
    kReceiveWindowCfg,
    kChannelPlanCfg,
    kFrequencyBand,
    kSpreadingFactor,
    kFirmwareVersion,
    kPreambleLength,
    kAntennaSelection,
    kChannelIndex,
    kBandwidth,
    kLoRaWANVersion,
    kDataDirection,
    kPayloadVersion,
    kFilterIndex,
    kSectionId,
    kSectionOptionsLength,
    kDeviceAddress,
    kDlPayload,
    kFreqHoppingPattern,
    kTxPower,
    kTransmissionSlot,
    kRxWindowCfg,
    kDeviceClass,
    kEnergyMode,
    kNetworkSync,
    kTrafficPriority,
    kBeaconBroadcast,
};

/// True for attributes carried in the fixed header group.
bool in_header_group(std::size_t index);

struct FieldOps {
    std::function<bool(const LoRaWANSection&)> present;
    std::function<void(const LoRaWANSection&, ByteWriter&)> write;
    std::function<void(LoRaWANSection&, ByteReader&)> read;
};

/// Body codecs for every non-header attribute (header-group entries are empty).
const std::array<FieldOps, kAttributeCount>& field_ops();

}  // namespace olrw::fronthaul::detail
