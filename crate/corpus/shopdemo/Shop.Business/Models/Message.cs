using System;

namespace Shop.Business.Models
{
    public class Message
    {
        private string to;
        private string body;
        private bool sent;

        public Message(string to, string body)
        {
            this.to = to;
            this.body = body;
        }

        public void Send()
        {
            sent = true;
        }
    }
}
