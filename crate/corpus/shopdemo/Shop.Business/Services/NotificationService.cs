using System;
using Acme.Mail;
using Shop.Data.Repositories;

namespace Shop.Business.Services
{
    public class NotificationService
    {
        private CustomerRepository customers = new CustomerRepository();
        private MailClient mail = new MailClient();

        public void OrderPlaced(int customerId, int orderId)
        {
            string email = customers.GetEmail(customerId);
            mail.Send(email, "Order confirmation #" + orderId);
        }
    }
}
