// SPDX-License-Identifier: Apache-2.0
#pragma once

// Values recorded from reference runs; a change means the numerics moved.

// Mean PSNR (dB) of the 64x64x8 blob scene solved with PAN guidance, TV,
// fixed estimator, tau 0.05, 30 stages.
inline constexpr double kBlobRegressionPsnr = 28.870271361567838;

// Objective 0.5*||z - c||^2 + 0.1*TV(z) after 50 TV iterations on the noisy
// 16x16 step edge.
inline constexpr double kNoisyStepObjective = 1.2981707787379484;
