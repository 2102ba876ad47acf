import { describe, expect, it } from "vitest";

import { CARD_SIZE, makeTestCard } from "../src/testcard";

// Reference pixels frozen from the server-side card generator; the two
// implementations must agree byte-for-byte for the parity check to mean
// anything.
const KNOWN_PIXELS: Array<[number, number, [number, number, number, number]]> = [
  [8, 8, [255, 0, 0, 255]],      // red patch
  [24, 8, [0, 255, 0, 255]],     // green patch
  [40, 8, [0, 0, 255, 255]],     // blue patch
  [56, 8, [255, 255, 255, 255]], // white patch
  [8, 24, [0, 0, 0, 255]],       // black patch
  [24, 40, [0, 128, 0, 255]],    // dark green patch
  [0, 56, [0, 0, 0, 255]],       // gradient start
  [63, 56, [255, 255, 255, 255]],// gradient end
  [32, 60, [130, 130, 130, 255]],// gradient midpoint: round(32*255/63)
];

describe("test card", () => {
  it("is 64x64 RGBA", () => {
    expect(makeTestCard().length).toBe(CARD_SIZE * CARD_SIZE * 4);
  });

  it("matches the reference generator at known pixels", () => {
    const card = makeTestCard();
    for (const [x, y, rgba] of KNOWN_PIXELS) {
      const at = (y * CARD_SIZE + x) * 4;
      expect([card[at], card[at + 1], card[at + 2], card[at + 3]], `pixel ${x},${y}`).toEqual(
        rgba,
      );
    }
  });

  it("is deterministic", () => {
    expect(makeTestCard()).toEqual(makeTestCard());
  });
});
