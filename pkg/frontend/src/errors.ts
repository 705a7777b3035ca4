export class AdapterError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Requested extraction backend is not registered or cannot run here. */
export class ModelUnavailable extends AdapterError {}

/** The clip carries no audio stream, so transcription is impossible. */
export class NoAudioStream extends AdapterError {}

/** The clip carries no video stream, so landmark extraction is impossible. */
export class NoVideoStream extends AdapterError {}

/** A model emitted an expression label outside the supported vocabulary. */
export class UnknownExpression extends AdapterError {}
