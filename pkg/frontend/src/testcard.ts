// The standard 64x64 test card, identical pixel-for-pixel with the
// server's: twelve 16x16 patches over a horizontal luminance gradient.

export const CARD_SIZE = 64;
const PATCH = 16;

// 4 columns x 3 rows, top-down display order.
const PATCH_COLORS: Array<[number, number, number]> = [
  [255, 0, 0], [0, 255, 0], [0, 0, 255], [255, 255, 255],
  [0, 0, 0], [255, 255, 0], [0, 255, 255], [255, 0, 255],
  [128, 128, 128], [0, 128, 0], [255, 128, 0], [64, 128, 255],
];

export function makeTestCard() {
  const data = new Uint8ClampedArray(CARD_SIZE * CARD_SIZE * 4);
  for (let index = 0; index < PATCH_COLORS.length; index++) {
    const [r, g, b] = PATCH_COLORS[index];
    const row = Math.floor(index / 4) * PATCH;
    const col = (index % 4) * PATCH;
    for (let y = row; y < row + PATCH; y++) {
      for (let x = col; x < col + PATCH; x++) {
        const at = (y * CARD_SIZE + x) * 4;
        data[at] = r;
        data[at + 1] = g;
        data[at + 2] = b;
        data[at + 3] = 255;
      }
    }
  }
  for (let y = 3 * PATCH; y < CARD_SIZE; y++) {
    for (let x = 0; x < CARD_SIZE; x++) {
      const v = Math.round((x * 255) / (CARD_SIZE - 1));
      const at = (y * CARD_SIZE + x) * 4;
      data[at] = v;
      data[at + 1] = v;
      data[at + 2] = v;
      data[at + 3] = 255;
    }
  }
  return data;
}
