// WebGL 1 execution of validated shaders.  Validated sources are plain
// GLSL ES 1.00, so they compile as-is; the only preparation is injecting
// a default float precision when the source omits it (required for
// fragment shaders on the GPU, optional in the language).

const VERTEX_SOURCE = `
attribute vec2 aPos;
varying vec2 vUv;
void main() {
  vUv = aPos * 0.5 + 0.5;
  gl_Position = vec4(aPos, 0.0, 1.0);
}
`;

export function prepareFragmentSource(source: string): string {
  if (/^\s*precision\s/m.test(source)) return source;
  return "precision mediump float;\n" + source;
}

export type CompileFailure = { log: string };

export class GlPipeline {
  private gl: WebGLRenderingContext;
  private program: WebGLProgram | null = null;
  private texture: WebGLTexture;
  private uTime: WebGLUniformLocation | null = null;
  private uResolution: WebGLUniformLocation | null = null;

  constructor(private canvas: HTMLCanvasElement) {
    const gl = canvas.getContext("webgl", { preserveDrawingBuffer: true });
    if (!gl) throw new Error("WebGL 1 is unavailable");
    this.gl = gl;

    const quad = gl.createBuffer();
    gl.bindBuffer(gl.ARRAY_BUFFER, quad);
    gl.bufferData(
      gl.ARRAY_BUFFER,
      new Float32Array([-1, -1, 3, -1, -1, 3]), // one oversized triangle
      gl.STATIC_DRAW,
    );

    this.texture = gl.createTexture()!;
    gl.bindTexture(gl.TEXTURE_2D, this.texture);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_S, gl.CLAMP_TO_EDGE);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_WRAP_T, gl.CLAMP_TO_EDGE);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MIN_FILTER, gl.LINEAR);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MAG_FILTER, gl.LINEAR);
  }

  private compile(kind: number, source: string): WebGLShader {
    const gl = this.gl;
    const shader = gl.createShader(kind)!;
    gl.shaderSource(shader, source);
    gl.compileShader(shader);
    if (!gl.getShaderParameter(shader, gl.COMPILE_STATUS)) {
      const log = gl.getShaderInfoLog(shader) ?? "unknown compile error";
      gl.deleteShader(shader);
      throw Object.assign(new Error(log), { log });
    }
    return shader;
  }

  /** Swap in a new fragment shader; on failure the old program survives. */
  useShader(fragmentSource: string): void {
    const gl = this.gl;
    const vertex = this.compile(gl.VERTEX_SHADER, VERTEX_SOURCE);
    const fragment = this.compile(gl.FRAGMENT_SHADER, prepareFragmentSource(fragmentSource));
    const program = gl.createProgram()!;
    gl.attachShader(program, vertex);
    gl.attachShader(program, fragment);
    gl.bindAttribLocation(program, 0, "aPos");
    gl.linkProgram(program);
    if (!gl.getProgramParameter(program, gl.LINK_STATUS)) {
      const log = gl.getProgramInfoLog(program) ?? "link failed";
      gl.deleteProgram(program);
      throw Object.assign(new Error(log), { log });
    }
    if (this.program) gl.deleteProgram(this.program);
    this.program = program;

    gl.useProgram(program);
    gl.enableVertexAttribArray(0);
    gl.vertexAttribPointer(0, 2, gl.FLOAT, false, 0, 0);
    gl.uniform1i(gl.getUniformLocation(program, "uMainTex"), 0);
    this.uTime = gl.getUniformLocation(program, "uTime");
    this.uResolution = gl.getUniformLocation(program, "uResolution");
  }

  /** Upload the current frame; flipped so uv (0,0) is bottom-left. */
  uploadFrame(frame: TexImageSource): void {
    const gl = this.gl;
    gl.activeTexture(gl.TEXTURE0);
    gl.bindTexture(gl.TEXTURE_2D, this.texture);
    gl.pixelStorei(gl.UNPACK_FLIP_Y_WEBGL, true);
    gl.texImage2D(gl.TEXTURE_2D, 0, gl.RGBA, gl.RGBA, gl.UNSIGNED_BYTE, frame);
  }

  uploadPixels(width: number, height: number, topDownRgba: Uint8ClampedArray): void {
    const gl = this.gl;
    // manual flip: texImage2D from raw buffers ignores UNPACK_FLIP_Y on
    // some stacks, so feed bottom-up rows directly
    const flipped = new Uint8Array(topDownRgba.length);
    const rowBytes = width * 4;
    for (let y = 0; y < height; y++) {
      const src = (height - 1 - y) * rowBytes;
      flipped.set(new Uint8Array(topDownRgba.buffer, src, rowBytes), y * rowBytes);
    }
    gl.activeTexture(gl.TEXTURE0);
    gl.bindTexture(gl.TEXTURE_2D, this.texture);
    gl.pixelStorei(gl.UNPACK_FLIP_Y_WEBGL, false);
    gl.texImage2D(gl.TEXTURE_2D, 0, gl.RGBA, width, height, 0, gl.RGBA, gl.UNSIGNED_BYTE, flipped);
  }

  render(time: number, width = this.canvas.width, height = this.canvas.height): void {
    const gl = this.gl;
    if (!this.program) return;
    gl.useProgram(this.program);
    gl.viewport(0, 0, width, height);
    if (this.uTime) gl.uniform1f(this.uTime, time);
    if (this.uResolution) gl.uniform2f(this.uResolution, width, height);
    gl.drawArrays(gl.TRIANGLES, 0, 3);
  }

  /** Render into an offscreen target and read back top-down RGBA rows. */
  renderToPixels(width: number, height: number, time: number): Uint8ClampedArray {
    const gl = this.gl;
    const target = gl.createTexture();
    gl.activeTexture(gl.TEXTURE1);
    gl.bindTexture(gl.TEXTURE_2D, target);
    gl.texImage2D(gl.TEXTURE_2D, 0, gl.RGBA, width, height, 0, gl.RGBA, gl.UNSIGNED_BYTE, null);
    gl.texParameteri(gl.TEXTURE_2D, gl.TEXTURE_MIN_FILTER, gl.NEAREST);
    const framebuffer = gl.createFramebuffer();
    gl.bindFramebuffer(gl.FRAMEBUFFER, framebuffer);
    gl.framebufferTexture2D(gl.FRAMEBUFFER, gl.COLOR_ATTACHMENT0, gl.TEXTURE_2D, target, 0);

    gl.activeTexture(gl.TEXTURE0);
    this.render(time, width, height);

    const bottomUp = new Uint8Array(width * height * 4);
    gl.readPixels(0, 0, width, height, gl.RGBA, gl.UNSIGNED_BYTE, bottomUp);
    gl.bindFramebuffer(gl.FRAMEBUFFER, null);
    gl.deleteFramebuffer(framebuffer);
    gl.deleteTexture(target);

    const topDown = new Uint8ClampedArray(bottomUp.length);
    const rowBytes = width * 4;
    for (let y = 0; y < height; y++) {
      topDown.set(bottomUp.subarray((height - 1 - y) * rowBytes, (height - y) * rowBytes), y * rowBytes);
    }
    return topDown;
  }
}
